//! Probability laws on the real line.
//!
//! A [`DistributionSpec`] exposes the cdf `F`, density or mass `f`, hazard
//! `r = f / (1 - F)`, cumulative hazard `R = -log(1 - F)`, endpoints and the
//! generalized inverse `F^-1(u) = inf{x : F(x) >= u}`.
//!
//! For discrete laws `1 - F(x)` is always computed as the strict tail sum
//! `sum_{x_j > x} f(x_j)`, never as `1 - sum_{x_j <= x} f(x_j)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on the total mass of a finite discrete law.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("outside the domain at x = {x}: {reason}")]
    Domain { x: f64, reason: &'static str },
    #[error("{0} is not a support point")]
    OffSupport(f64),
    #[error("unsupported for this law: {0}")]
    Unsupported(&'static str),
    #[error("cannot parse distribution `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Law {
    Exponential { theta: f64 },
    Uniform { a: f64, b: f64 },
    Geometric { p: f64 },
    Finite { support: Vec<f64>, probs: Vec<f64>, cum: Vec<f64>, tail: Vec<f64> },
    Tabulated { grid: Vec<f64>, cdf: Vec<f64> },
}

/// Lower and upper endpoints of a law, with the mass of the upper endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Endpoints {
    pub lep: f64,
    pub uep: f64,
    pub uep_atom_mass: f64,
}

/// An immutable, validated probability law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct DistributionSpec {
    law: Law,
}

/// Wire format, e.g. `{"dist":"exponential","theta":1.0}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "lowercase")]
enum RawSpec {
    Exponential { theta: f64 },
    Uniform { a: f64, b: f64 },
    Geometric { p: f64 },
    Finite { support: Vec<f64>, probs: Vec<f64> },
    Tabulated { grid: Vec<f64>, cdf: Vec<f64> },
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = DistError;

    fn try_from(raw: RawSpec) -> Result<Self, DistError> {
        match raw {
            RawSpec::Exponential { theta } => DistributionSpec::exponential(theta),
            RawSpec::Uniform { a, b } => DistributionSpec::uniform(a, b),
            RawSpec::Geometric { p } => DistributionSpec::geometric(p),
            RawSpec::Finite { support, probs } => DistributionSpec::finite(support, probs),
            RawSpec::Tabulated { grid, cdf } => DistributionSpec::tabulated(grid, cdf),
        }
    }
}

impl From<DistributionSpec> for RawSpec {
    fn from(d: DistributionSpec) -> Self {
        match d.law {
            Law::Exponential { theta } => RawSpec::Exponential { theta },
            Law::Uniform { a, b } => RawSpec::Uniform { a, b },
            Law::Geometric { p } => RawSpec::Geometric { p },
            Law::Finite { support, probs, .. } => RawSpec::Finite { support, probs },
            Law::Tabulated { grid, cdf } => RawSpec::Tabulated { grid, cdf },
        }
    }
}

fn invalid(msg: impl Into<String>) -> DistError {
    DistError::InvalidParameter(msg.into())
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|w| w[0] < w[1])
}

impl DistributionSpec {
    pub fn exponential(theta: f64) -> Result<Self, DistError> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(invalid(format!("exponential rate must be positive, got {theta}")));
        }
        Ok(DistributionSpec { law: Law::Exponential { theta } })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self, DistError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(invalid(format!("uniform needs finite a < b, got ({a}, {b})")));
        }
        Ok(DistributionSpec { law: Law::Uniform { a, b } })
    }

    /// Number of Bernoulli(p) trials up to the first success: `f(k) = q^(k-1) p`, `k >= 1`.
    pub fn geometric(p: f64) -> Result<Self, DistError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("geometric p must lie in (0,1), got {p}")));
        }
        Ok(DistributionSpec { law: Law::Geometric { p } })
    }

    pub fn finite(support: Vec<f64>, probs: Vec<f64>) -> Result<Self, DistError> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(invalid("support and probs must be nonempty and of equal length"));
        }
        if !strictly_increasing(&support) {
            return Err(invalid("support must be finite and strictly increasing"));
        }
        if probs.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(invalid("probabilities must be positive"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        let mut cum = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cum.push(acc);
        }
        *cum.last_mut().unwrap() = 1.0;
        let mut tail = vec![0.0; probs.len()];
        let mut acc = 0.0;
        for i in (0..probs.len()).rev() {
            tail[i] = acc;
            acc += probs[i];
        }
        Ok(DistributionSpec { law: Law::Finite { support, probs, cum, tail } })
    }

    /// Uniform law on `{1, ..., m}`.
    pub fn discrete_uniform(m: usize) -> Result<Self, DistError> {
        if m == 0 {
            return Err(invalid("discrete uniform needs m >= 1"));
        }
        let support = (1..=m).map(|k| k as f64).collect();
        DistributionSpec::finite(support, vec![1.0 / m as f64; m])
    }

    /// Continuous law with a piecewise-linear cdf through `(grid[i], cdf[i])`.
    pub fn tabulated(grid: Vec<f64>, cdf: Vec<f64>) -> Result<Self, DistError> {
        if grid.len() < 2 || grid.len() != cdf.len() {
            return Err(invalid("tabulated law needs at least two grid points"));
        }
        if !strictly_increasing(&grid) {
            return Err(invalid("grid must be finite and strictly increasing"));
        }
        if cdf.iter().any(|c| !(0.0..=1.0).contains(c)) || cdf.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("cdf values must be nondecreasing in [0,1]"));
        }
        if cdf[0] != 0.0 || *cdf.last().unwrap() != 1.0 {
            return Err(invalid("cdf values must start at 0 and reach 1"));
        }
        Ok(DistributionSpec { law: Law::Tabulated { grid, cdf } })
    }

    /// Parses either a JSON object or a shorthand such as `exp:1.0`,
    /// `geom:0.5`, `unif:0,1`, `dunif:6` or `finite:1,2,3@0.2,0.3,0.5`.
    pub fn parse(text: &str) -> Result<Self, DistError> {
        let text = text.trim();
        if text.starts_with('{') {
            return serde_json::from_str(text).map_err(|e| DistError::Parse(e.to_string()));
        }
        let (name, args) = text.split_once(':').ok_or_else(|| DistError::Parse(text.into()))?;
        let nums = |s: &str| -> Result<Vec<f64>, DistError> {
            s.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| DistError::Parse(text.into()))).collect()
        };
        match name {
            "exp" | "exponential" => match nums(args)?.as_slice() {
                [theta] => DistributionSpec::exponential(*theta),
                _ => Err(DistError::Parse(text.into())),
            },
            "geom" | "geometric" => match nums(args)?.as_slice() {
                [p] => DistributionSpec::geometric(*p),
                _ => Err(DistError::Parse(text.into())),
            },
            "unif" | "uniform" => match nums(args)?.as_slice() {
                [a, b] => DistributionSpec::uniform(*a, *b),
                _ => Err(DistError::Parse(text.into())),
            },
            "dunif" => {
                let m: usize = args.trim().parse().map_err(|_| DistError::Parse(text.into()))?;
                DistributionSpec::discrete_uniform(m)
            }
            "finite" => {
                let (s, p) = args.split_once('@').ok_or_else(|| DistError::Parse(text.into()))?;
                DistributionSpec::finite(nums(s)?, nums(p)?)
            }
            _ => Err(DistError::Parse(text.into())),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.law, Law::Geometric { .. } | Law::Finite { .. })
    }

    pub fn is_continuous(&self) -> bool {
        !self.is_discrete()
    }

    /// True when [`pdf`](Self::pdf) is a finite-difference approximation.
    pub fn density_is_approximate(&self) -> bool {
        matches!(self.law, Law::Tabulated { .. })
    }

    /// Short human-readable name, e.g. `exp:2`.
    pub fn label(&self) -> String {
        match &self.law {
            Law::Exponential { theta } => format!("exp:{theta}"),
            Law::Uniform { a, b } => format!("unif:{a},{b}"),
            Law::Geometric { p } => format!("geom:{p}"),
            Law::Finite { support, .. } => format!("finite[{}]", support.len()),
            Law::Tabulated { grid, .. } => format!("tabulated[{}]", grid.len()),
        }
    }

    /// Right-continuous cdf `F(x) = P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.law {
            Law::Exponential { theta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-theta * x).exp_m1()
                }
            }
            Law::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Law::Geometric { p } => {
                if x < 1.0 {
                    0.0
                } else {
                    -(x.floor() * (1.0 - p).ln()).exp_m1()
                }
            }
            Law::Finite { support, cum, .. } => {
                let k = support.partition_point(|&s| s <= x);
                if k == 0 {
                    0.0
                } else {
                    cum[k - 1]
                }
            }
            Law::Tabulated { grid, cdf } => tabulated_cdf(grid, cdf, x),
        }
    }

    /// Survival function `P(X > x)`; for discrete laws a strict tail sum.
    pub fn survival(&self, x: f64) -> f64 {
        match &self.law {
            Law::Exponential { theta } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-theta * x).exp()
                }
            }
            Law::Uniform { a, b } => ((b - x) / (b - a)).clamp(0.0, 1.0),
            Law::Geometric { p } => {
                if x < 1.0 {
                    1.0
                } else {
                    (1.0 - p).powf(x.floor())
                }
            }
            Law::Finite { support, tail, .. } => {
                let k = support.partition_point(|&s| s <= x);
                if k == 0 {
                    1.0
                } else {
                    tail[k - 1]
                }
            }
            Law::Tabulated { grid, cdf } => 1.0 - tabulated_cdf(grid, cdf, x),
        }
    }

    /// Lebesgue density for continuous laws, point mass for discrete ones.
    pub fn pdf(&self, x: f64) -> f64 {
        match &self.law {
            Law::Exponential { theta } => {
                if x < 0.0 {
                    0.0
                } else {
                    theta * (-theta * x).exp()
                }
            }
            Law::Uniform { a, b } => {
                if x < *a || x > *b {
                    0.0
                } else {
                    1.0 / (b - a)
                }
            }
            Law::Geometric { p } => {
                if x >= 1.0 && x.fract() == 0.0 {
                    p * (1.0 - p).powf(x - 1.0)
                } else {
                    0.0
                }
            }
            Law::Finite { support, probs, .. } => match support.binary_search_by(|s| s.total_cmp(&x)) {
                Ok(i) => probs[i],
                Err(_) => 0.0,
            },
            Law::Tabulated { grid, cdf } => {
                let h = 1e-6 * (grid[grid.len() - 1] - grid[0]);
                (tabulated_cdf(grid, cdf, x + h) - tabulated_cdf(grid, cdf, x - h)) / (2.0 * h)
            }
        }
    }

    /// Whether `x` is a support point (discrete) or lies in `[lep, uep]` (continuous).
    pub fn in_support(&self, x: f64) -> bool {
        match &self.law {
            Law::Geometric { .. } | Law::Finite { .. } => self.pdf(x) > 0.0,
            _ => {
                let e = self.endpoints();
                x >= e.lep && x <= e.uep
            }
        }
    }

    /// Hazard `r(x) = f(x) / P(X > x)`.
    pub fn hazard(&self, x: f64) -> Result<f64, DistError> {
        if self.is_discrete() && !self.in_support(x) {
            return Err(DistError::OffSupport(x));
        }
        if let Law::Geometric { p } = self.law {
            return Ok(p / (1.0 - p));
        }
        if let Law::Exponential { theta } = self.law {
            return Ok(if x < 0.0 { 0.0 } else { theta });
        }
        let tail = self.survival(x);
        if tail <= 0.0 {
            return Err(DistError::Domain { x, reason: "F(x) = 1" });
        }
        Ok(self.pdf(x) / tail)
    }

    /// Cumulative hazard `R(x) = -log(P(X > x))`.
    pub fn cum_hazard(&self, x: f64) -> Result<f64, DistError> {
        match self.law {
            Law::Exponential { theta } => Ok(if x <= 0.0 { 0.0 } else { theta * x }),
            Law::Geometric { p } => Ok(if x < 1.0 { 0.0 } else { -x.floor() * (1.0 - p).ln() }),
            Law::Uniform { a, b } => {
                if x >= b {
                    Err(DistError::Domain { x, reason: "F(x) = 1" })
                } else if x <= a {
                    Ok(0.0)
                } else {
                    Ok(-((b - x) / (b - a)).ln())
                }
            }
            _ => {
                let tail = self.survival(x);
                if tail <= 0.0 {
                    Err(DistError::Domain { x, reason: "F(x) = 1" })
                } else {
                    Ok(-tail.ln())
                }
            }
        }
    }

    /// Generalized inverse `inf{x : F(x) >= u}` for `0 < u < 1`.
    pub fn quantile(&self, u: f64) -> Result<f64, DistError> {
        if !(u > 0.0 && u < 1.0) {
            return Err(invalid(format!("quantile level must lie in (0,1), got {u}")));
        }
        Ok(match &self.law {
            Law::Exponential { theta } => -(-u).ln_1p() / theta,
            Law::Uniform { a, b } => a + u * (b - a),
            Law::Geometric { p } => {
                let mut k = ((-u).ln_1p() / (1.0 - p).ln()).ceil().max(1.0);
                while k > 1.0 && self.cdf(k - 1.0) >= u {
                    k -= 1.0;
                }
                while self.cdf(k) < u {
                    k += 1.0;
                }
                k
            }
            Law::Finite { support, cum, .. } => support[cum.partition_point(|&c| c < u)],
            Law::Tabulated { grid, cdf } => {
                let j = cdf.partition_point(|&c| c < u);
                let (c0, c1) = (cdf[j - 1], cdf[j]);
                grid[j - 1] + (u - c0) / (c1 - c0) * (grid[j] - grid[j - 1])
            }
        })
    }

    /// Inverse of the cumulative hazard: `F^-1(1 - exp(-e))` for `e > 0`,
    /// computed without forming `1 - exp(-e)` where a closed form exists.
    pub fn inverse_cum_hazard(&self, e: f64) -> Result<f64, DistError> {
        match self.law {
            Law::Exponential { theta } => Ok(e / theta),
            Law::Uniform { a, b } => Ok(b - (b - a) * (-e).exp()),
            _ => {
                let u = -(-e).exp_m1();
                self.quantile(u.min(1.0 - f64::EPSILON / 2.0))
            }
        }
    }

    pub fn endpoints(&self) -> Endpoints {
        match &self.law {
            Law::Exponential { .. } => Endpoints { lep: 0.0, uep: f64::INFINITY, uep_atom_mass: 0.0 },
            Law::Uniform { a, b } => Endpoints { lep: *a, uep: *b, uep_atom_mass: 0.0 },
            Law::Geometric { .. } => Endpoints { lep: 1.0, uep: f64::INFINITY, uep_atom_mass: 0.0 },
            Law::Finite { support, probs, .. } => {
                Endpoints { lep: support[0], uep: support[support.len() - 1], uep_atom_mass: probs[probs.len() - 1] }
            }
            Law::Tabulated { grid, cdf } => {
                let lo = cdf.iter().rposition(|&c| c == 0.0).unwrap_or(0);
                let hi = cdf.iter().position(|&c| c == 1.0).unwrap_or(grid.len() - 1);
                Endpoints { lep: grid[lo], uep: grid[hi], uep_atom_mass: 0.0 }
            }
        }
    }

    /// Support points strictly below `y`, in increasing order (discrete laws only).
    pub fn support_below(&self, y: f64) -> Result<Vec<f64>, DistError> {
        match &self.law {
            Law::Geometric { .. } => {
                let top = y.ceil() as i64;
                Ok((1..top).map(|k| k as f64).collect())
            }
            Law::Finite { support, .. } => Ok(support.iter().copied().take_while(|&s| s < y).collect()),
            _ => Err(DistError::Unsupported("support enumeration needs a discrete law")),
        }
    }

    /// Support points in increasing order, cut where the remaining tail mass
    /// drops below `tail_eps`. Returns the points and the discarded mass.
    pub fn truncated_support(&self, tail_eps: f64) -> Result<(Vec<f64>, f64), DistError> {
        match &self.law {
            Law::Finite { support, .. } => Ok((support.clone(), 0.0)),
            Law::Geometric { p } => {
                let q = 1.0 - p;
                // P(X > k) = q^k
                let k = (tail_eps.ln() / q.ln()).ceil().max(1.0) as usize;
                Ok(((1..=k).map(|v| v as f64).collect(), q.powi(k as i32)))
            }
            _ => Err(DistError::Unsupported("support enumeration needs a discrete law")),
        }
    }
}

fn tabulated_cdf(grid: &[f64], cdf: &[f64], x: f64) -> f64 {
    if x <= grid[0] {
        return cdf[0];
    }
    if x >= grid[grid.len() - 1] {
        return 1.0;
    }
    let j = grid.partition_point(|&g| g <= x);
    let t = (x - grid[j - 1]) / (grid[j] - grid[j - 1]);
    cdf[j - 1] + t * (cdf[j] - cdf[j - 1])
}

impl std::str::FromStr for DistributionSpec {
    type Err = DistError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DistributionSpec::parse(s)
    }
}
