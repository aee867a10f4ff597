//! Closed-form laws of records for iid sequences.
//!
//! The distribution-free pmfs (inter-record gaps, record times, the gamma
//! integral) take no [`DistributionSpec`] at all and are evaluated in exact
//! rational arithmetic; the `*_exact` variants expose the rationals.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dist::{DistError, DistributionSpec};

/// Highest degree of elementary symmetric sum used by [`discrete_record_pmf`].
pub const MAX_SYMMETRIC_DEGREE: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LawError {
    #[error("gap lengths must all be >= 1")]
    InvalidGap,
    #[error("record times must satisfy 2 <= l2 < l3 < ...")]
    InvalidTimes,
    #[error("exponents must all be >= 1")]
    InvalidExponent,
    #[error("empty input tuple")]
    EmptyTuple,
    #[error("{0} needs a {1} law")]
    UnsupportedVariant(&'static str, &'static str),
    #[error("index tuple has {indices} entries but {values} values were given")]
    ShapeMismatch { indices: usize, values: usize },
    #[error("index tuple must be strictly increasing and start at >= 1")]
    InvalidIndices,
    #[error("{0} is not a support point")]
    OffSupport(f64),
    #[error("symmetric-sum degree {0} exceeds the cap of {MAX_SYMMETRIC_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("horizon {horizon} is smaller than the number of records {n}")]
    InvalidHorizon { horizon: u64, n: usize },
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Identifiers of the closed-form evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FormulaId {
    #[serde(rename = "interRecords")]
    InterRecords,
    #[serde(rename = "recordTimes")]
    RecordTimes,
    #[serde(rename = "recordTimeTransition")]
    RecordTimeTransition,
    #[serde(rename = "ADR3")]
    Adr3,
    #[serde(rename = "ADR1")]
    Adr1,
    #[serde(rename = "ADR2")]
    Adr2,
    #[serde(rename = "DDR3")]
    Ddr3,
    #[serde(rename = "DDR2")]
    Ddr2,
    #[serde(rename = "PEX1")]
    Pex1,
    #[serde(rename = "GRDMR")]
    Grdmr,
    #[serde(rename = "nrec03")]
    Nrec03,
    #[serde(rename = "gamma")]
    Gamma,
    #[serde(rename = "gs21")]
    Gs21,
}

impl FormulaId {
    pub const ALL: [FormulaId; 13] = [
        FormulaId::InterRecords,
        FormulaId::RecordTimes,
        FormulaId::RecordTimeTransition,
        FormulaId::Adr3,
        FormulaId::Adr1,
        FormulaId::Adr2,
        FormulaId::Ddr3,
        FormulaId::Ddr2,
        FormulaId::Pex1,
        FormulaId::Grdmr,
        FormulaId::Nrec03,
        FormulaId::Gamma,
        FormulaId::Gs21,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::InterRecords => "interRecords",
            FormulaId::RecordTimes => "recordTimes",
            FormulaId::RecordTimeTransition => "recordTimeTransition",
            FormulaId::Adr3 => "ADR3",
            FormulaId::Adr1 => "ADR1",
            FormulaId::Adr2 => "ADR2",
            FormulaId::Ddr3 => "DDR3",
            FormulaId::Ddr2 => "DDR2",
            FormulaId::Pex1 => "PEX1",
            FormulaId::Grdmr => "GRDMR",
            FormulaId::Nrec03 => "nrec03",
            FormulaId::Gamma => "gamma",
            FormulaId::Gs21 => "gs21",
        }
    }

    /// Name of the evaluator in this module.
    pub fn operation(self) -> &'static str {
        match self {
            FormulaId::InterRecords => "interrecord_joint_pmf",
            FormulaId::RecordTimes => "record_times_joint_pmf",
            FormulaId::RecordTimeTransition => "record_time_transition_pmf",
            FormulaId::Adr3 => "record_value_marginal_pdf",
            FormulaId::Adr1 => "record_value_joint_pdf",
            FormulaId::Adr2 => "record_value_subvector_pdf",
            FormulaId::Ddr3 => "discrete_record_pmf",
            FormulaId::Ddr2 => "discrete_record_joint_pmf",
            FormulaId::Pex1 => "joint_max_cdf",
            FormulaId::Grdmr => "record_joint_cdf_truncated",
            FormulaId::Nrec03 => "prob_no_further_record",
            FormulaId::Gamma => "gamma_integral",
            FormulaId::Gs21 => "hazard_simplex_integral",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FormulaId::InterRecords => "P(D2=k2,...,Dn=kn), distribution-free (--k)",
            FormulaId::RecordTimes => "P(U(2)=l2,...,U(n)=ln), distribution-free (--ell)",
            FormulaId::RecordTimeTransition => "P(U(n+1)=j | U(n)=k) (--k, --j)",
            FormulaId::Adr3 => "density of the n-th record value (--dist, --n, --x)",
            FormulaId::Adr1 => "joint density of the first n record values (--dist, --x)",
            FormulaId::Adr2 => "joint density of records n1<...<nk (--dist, --idx, --x)",
            FormulaId::Ddr3 => "pmf of the n-th record value, discrete law (--dist, --n, --x)",
            FormulaId::Ddr2 => "joint pmf of the first n record values, discrete law (--dist, --x)",
            FormulaId::Pex1 => "joint cdf of running maxima M1..Mn (--dist, --x)",
            FormulaId::Grdmr => "record joint cdf summed over record times up to --horizon (--dist, --x)",
            FormulaId::Nrec03 => "probability of no record after the first (--dist)",
            FormulaId::Gamma => "ordered-simplex integral of prod F^(kj-1) dF (--k)",
            FormulaId::Gs21 => "ordered-simplex integral of the hazard product (--dist, --n, --z, --y)",
        }
    }
}

impl std::str::FromStr for FormulaId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FormulaId::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown formula `{s}`"))
    }
}

impl std::fmt::Display for FormulaId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A probability, density or mass produced by a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LawValue {
    pub value: f64,
    #[serde(rename = "formula")]
    pub formula_id: FormulaId,
    #[serde(rename = "support")]
    pub support_flag: bool,
}

impl LawValue {
    fn inside(formula_id: FormulaId, value: f64) -> Self {
        LawValue { value, formula_id, support_flag: true }
    }

    fn outside(formula_id: FormulaId) -> Self {
        LawValue { value: 0.0, formula_id, support_flag: false }
    }
}

/// Result of a truncated series together with the weight it left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedLaw {
    #[serde(flatten)]
    pub law: LawValue,
    pub truncation_mass: f64,
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

fn reciprocal_of_product(factors: impl IntoIterator<Item = u64>) -> BigRational {
    let den = factors.into_iter().fold(BigInt::one(), |acc, f| acc * big(f));
    BigRational::new(BigInt::one(), den)
}

/// `P(D2 = k2, ..., Dn = kn) = ((s_n + 1) * prod_j s_j)^-1` with
/// `s_j = k2 + ... + kj`, for any continuous iid sequence.
pub fn interrecord_joint_pmf_exact(gaps: &[u64]) -> Result<BigRational, LawError> {
    if gaps.is_empty() {
        return Err(LawError::EmptyTuple);
    }
    if gaps.contains(&0) {
        return Err(LawError::InvalidGap);
    }
    let partial: Vec<u64> = gaps
        .iter()
        .scan(0u64, |s, &k| {
            *s += k;
            Some(*s)
        })
        .collect();
    let last = *partial.last().unwrap();
    Ok(reciprocal_of_product(partial.into_iter().chain([last + 1])))
}

pub fn interrecord_joint_pmf(gaps: &[u64]) -> Result<LawValue, LawError> {
    Ok(LawValue::inside(FormulaId::InterRecords, ratio_to_f64(&interrecord_joint_pmf_exact(gaps)?)))
}

/// `P(U(2) = l2, ..., U(n) = ln) = (ln * prod_j (lj - 1))^-1` on `2 <= l2 < ... < ln`.
pub fn record_times_joint_pmf_exact(times: &[u64]) -> Result<BigRational, LawError> {
    if times.is_empty() {
        return Err(LawError::EmptyTuple);
    }
    if times[0] < 2 || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LawError::InvalidTimes);
    }
    let last = *times.last().unwrap();
    Ok(reciprocal_of_product(times.iter().map(|&l| l - 1).chain([last])))
}

pub fn record_times_joint_pmf(times: &[u64]) -> Result<LawValue, LawError> {
    Ok(LawValue::inside(FormulaId::RecordTimes, ratio_to_f64(&record_times_joint_pmf_exact(times)?)))
}

/// `P(U(n+1) = j | U(n) = k) = k / (j (j - 1))` for `j > k >= 1`, zero otherwise.
pub fn record_time_transition_exact(k: u64, j: u64) -> BigRational {
    if k == 0 || j <= k {
        return BigRational::zero();
    }
    BigRational::new(big(k), big(j) * big(j - 1))
}

pub fn record_time_transition_pmf(k: u64, j: u64) -> LawValue {
    if k == 0 || j <= k {
        return LawValue::outside(FormulaId::RecordTimeTransition);
    }
    LawValue::inside(FormulaId::RecordTimeTransition, ratio_to_f64(&record_time_transition_exact(k, j)))
}

/// `int_{x1 < ... < xn} prod_j F(xj)^(kj - 1) dF(x1) ... dF(xn) = (prod_j (k1 + ... + kj))^-1`.
pub fn gamma_integral_exact(exponents: &[u64]) -> Result<BigRational, LawError> {
    if exponents.is_empty() {
        return Err(LawError::EmptyTuple);
    }
    if exponents.contains(&0) {
        return Err(LawError::InvalidExponent);
    }
    let partial = exponents.iter().scan(0u64, |s, &k| {
        *s += k;
        Some(*s)
    });
    Ok(reciprocal_of_product(partial))
}

pub fn gamma_integral(exponents: &[u64]) -> Result<LawValue, LawError> {
    Ok(LawValue::inside(FormulaId::Gamma, ratio_to_f64(&gamma_integral_exact(exponents)?)))
}

/// `(n - 1)!` as a float.
pub(crate) fn gamma_of_integer(n: usize) -> f64 {
    (1..n).map(|k| k as f64).product()
}

fn require_continuous(d: &DistributionSpec, op: &'static str) -> Result<(), LawError> {
    if d.is_continuous() {
        Ok(())
    } else {
        Err(LawError::UnsupportedVariant(op, "continuous"))
    }
}

fn require_discrete(d: &DistributionSpec, op: &'static str) -> Result<(), LawError> {
    if d.is_discrete() {
        Ok(())
    } else {
        Err(LawError::UnsupportedVariant(op, "discrete"))
    }
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

/// Density of the `n`-th record value: `R(x)^(n-1) f(x) / (n-1)!`.
pub fn record_value_marginal_pdf(d: &DistributionSpec, n: usize, x: f64) -> Result<LawValue, LawError> {
    require_continuous(d, "record_value_marginal_pdf")?;
    if n == 0 {
        return Err(LawError::InvalidIndices);
    }
    let f = d.pdf(x);
    if f <= 0.0 || d.survival(x) <= 0.0 {
        return Ok(LawValue::outside(FormulaId::Adr3));
    }
    let r = d.cum_hazard(x)?;
    Ok(LawValue::inside(FormulaId::Adr3, r.powi(n as i32 - 1) * f / gamma_of_integer(n)))
}

/// Joint density of `(X(1), ..., X(n))`: `prod_{i<n} r(y_i) * f(y_n)` on `y_1 < ... < y_n`.
pub fn record_value_joint_pdf(d: &DistributionSpec, ys: &[f64]) -> Result<LawValue, LawError> {
    require_continuous(d, "record_value_joint_pdf")?;
    if ys.is_empty() {
        return Err(LawError::EmptyTuple);
    }
    if !strictly_increasing(ys) || ys.iter().any(|&y| d.pdf(y) <= 0.0) {
        return Ok(LawValue::outside(FormulaId::Adr1));
    }
    let (last, head) = ys.split_last().unwrap();
    let mut value = d.pdf(*last);
    for &y in head {
        if d.survival(y) <= 0.0 {
            return Ok(LawValue::outside(FormulaId::Adr1));
        }
        value *= d.hazard(y)?;
    }
    Ok(LawValue::inside(FormulaId::Adr1, value))
}

/// Joint density of `(X(n_1), ..., X(n_k))` for `1 <= n_1 < ... < n_k`.
///
/// Each block of skipped records contributes
/// `(R(y_j) - R(y_{j-1}))^(m-1) / (m-1)!` with `m = n_j - n_{j-1}`,
/// `n_0 = 0` and `R(y_0) = 0`.
pub fn record_value_subvector_pdf(d: &DistributionSpec, indices: &[usize], ys: &[f64]) -> Result<LawValue, LawError> {
    require_continuous(d, "record_value_subvector_pdf")?;
    if indices.len() != ys.len() {
        return Err(LawError::ShapeMismatch { indices: indices.len(), values: ys.len() });
    }
    if indices.is_empty() {
        return Err(LawError::EmptyTuple);
    }
    if indices[0] == 0 || indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LawError::InvalidIndices);
    }
    if !strictly_increasing(ys) || ys.iter().any(|&y| d.pdf(y) <= 0.0) {
        return Ok(LawValue::outside(FormulaId::Adr2));
    }
    if ys[..ys.len() - 1].iter().any(|&y| d.survival(y) <= 0.0) {
        return Ok(LawValue::outside(FormulaId::Adr2));
    }
    let k = ys.len();
    let mut value = d.pdf(ys[k - 1]);
    let mut prev_index = 0usize;
    let mut prev_r = 0.0;
    for (j, (&idx, &y)) in indices.iter().zip(ys).enumerate() {
        let m = idx - prev_index;
        let r_y = if j + 1 < k || m > 1 { d.cum_hazard(y)? } else { 0.0 };
        if m > 1 {
            value *= (r_y - prev_r).powi(m as i32 - 1) / gamma_of_integer(m);
        }
        if j + 1 < k {
            value *= d.hazard(y)?;
        }
        prev_index = idx;
        prev_r = r_y;
    }
    Ok(LawValue::inside(FormulaId::Adr2, value))
}

/// Elementary symmetric polynomial `e_degree(values)` by the one-pass recurrence.
pub fn elementary_symmetric(values: &[f64], degree: usize) -> f64 {
    let mut e = vec![0.0; degree + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        for j in (1..=degree.min(i + 1)).rev() {
            e[j] += e[j - 1] * v;
        }
    }
    e[degree]
}

/// `P(X(n) = y)` for a discrete law: the degree-`(n-1)` elementary symmetric
/// sum of hazards over support points strictly below `y`, times `f(y)`.
pub fn discrete_record_pmf(d: &DistributionSpec, n: usize, y: f64) -> Result<LawValue, LawError> {
    require_discrete(d, "discrete_record_pmf")?;
    if n == 0 {
        return Err(LawError::InvalidIndices);
    }
    if !d.in_support(y) {
        return Err(LawError::OffSupport(y));
    }
    let degree = n - 1;
    if degree > MAX_SYMMETRIC_DEGREE {
        return Err(LawError::DegreeTooLarge(degree));
    }
    let below = d.support_below(y)?;
    if below.len() < degree {
        return Ok(LawValue::outside(FormulaId::Ddr3));
    }
    let hazards = below.iter().map(|&t| d.hazard(t)).collect::<Result<Vec<_>, _>>()?;
    Ok(LawValue::inside(FormulaId::Ddr3, elementary_symmetric(&hazards, degree) * d.pdf(y)))
}

/// `P(X(1) = y_1, ..., X(n) = y_n) = prod_{i<n} r(y_i) * f(y_n)` for a discrete law.
/// Off-support or non-increasing inputs give zero with the support flag cleared.
pub fn discrete_record_joint_pmf(d: &DistributionSpec, ys: &[f64]) -> Result<LawValue, LawError> {
    require_discrete(d, "discrete_record_joint_pmf")?;
    if ys.is_empty() {
        return Err(LawError::EmptyTuple);
    }
    if !strictly_increasing(ys) || ys.iter().any(|&y| !d.in_support(y)) {
        return Ok(LawValue::outside(FormulaId::Ddr2));
    }
    let (last, head) = ys.split_last().unwrap();
    let mut value = d.pdf(*last);
    for &y in head {
        match d.hazard(y) {
            Ok(r) => value *= r,
            // nothing can beat the upper endpoint
            Err(DistError::Domain { .. }) => return Ok(LawValue::outside(FormulaId::Ddr2)),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(LawValue::inside(FormulaId::Ddr2, value))
}

/// A discrete law with rational masses on integer support points, for
/// exact evaluation of the discrete record laws.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactDiscreteLaw {
    /// `f(k) = q^(k-1) p`, `k >= 1`.
    Geometric { p: BigRational },
    /// Strictly increasing support with positive masses summing to one.
    Finite { support: Vec<i64>, probs: Vec<BigRational> },
}

impl ExactDiscreteLaw {
    pub fn geometric(num: i64, den: i64) -> Self {
        ExactDiscreteLaw::Geometric { p: BigRational::new(num.into(), den.into()) }
    }

    pub fn pmf(&self, y: i64) -> BigRational {
        match self {
            ExactDiscreteLaw::Geometric { p } => {
                if y < 1 {
                    return BigRational::zero();
                }
                let q = BigRational::one() - p;
                num::pow(q, (y - 1) as usize) * p
            }
            ExactDiscreteLaw::Finite { support, probs } => match support.binary_search(&y) {
                Ok(i) => probs[i].clone(),
                Err(_) => BigRational::zero(),
            },
        }
    }

    /// Strict tail `P(X > y)`.
    pub fn tail(&self, y: i64) -> BigRational {
        match self {
            ExactDiscreteLaw::Geometric { p } => {
                if y < 1 {
                    return BigRational::one();
                }
                num::pow(BigRational::one() - p, y as usize)
            }
            ExactDiscreteLaw::Finite { support, probs } => {
                support.iter().zip(probs).filter(|(s, _)| **s > y).fold(BigRational::zero(), |acc, (_, p)| acc + p)
            }
        }
    }

    fn support_below(&self, y: i64) -> Vec<i64> {
        match self {
            ExactDiscreteLaw::Geometric { .. } => (1..y).collect(),
            ExactDiscreteLaw::Finite { support, .. } => support.iter().copied().filter(|&s| s < y).collect(),
        }
    }

    /// `f(y) / P(X > y)`; `None` at the upper endpoint.
    pub fn hazard(&self, y: i64) -> Option<BigRational> {
        let tail = self.tail(y);
        if tail.is_zero() {
            None
        } else {
            Some(self.pmf(y) / tail)
        }
    }
}

/// Exact `prod_{i<n} r(y_i) * f(y_n)`; zero off the increasing support.
pub fn discrete_record_joint_pmf_exact(law: &ExactDiscreteLaw, ys: &[i64]) -> Result<BigRational, LawError> {
    if ys.is_empty() {
        return Err(LawError::EmptyTuple);
    }
    if ys.windows(2).any(|w| w[0] >= w[1]) || ys.iter().any(|&y| law.pmf(y).is_zero()) {
        return Ok(BigRational::zero());
    }
    let (last, head) = ys.split_last().unwrap();
    let mut value = law.pmf(*last);
    for &y in head {
        match law.hazard(y) {
            Some(r) => value *= r,
            None => return Ok(BigRational::zero()),
        }
    }
    Ok(value)
}

/// Exact `P(X(n) = y)` via the elementary symmetric recurrence in rationals.
pub fn discrete_record_pmf_exact(law: &ExactDiscreteLaw, n: usize, y: i64) -> Result<BigRational, LawError> {
    if n == 0 {
        return Err(LawError::InvalidIndices);
    }
    let degree = n - 1;
    if degree > MAX_SYMMETRIC_DEGREE {
        return Err(LawError::DegreeTooLarge(degree));
    }
    let mut e = vec![BigRational::zero(); degree + 1];
    e[0] = BigRational::one();
    for t in law.support_below(y) {
        let Some(r) = law.hazard(t) else { continue };
        for j in (1..=degree).rev() {
            let add = &e[j - 1] * &r;
            e[j] += add;
        }
    }
    Ok(&e[degree] * law.pmf(y))
}

/// `P(M_1 <= y_1, ..., M_n <= y_n) = prod_i F(min_{j >= i} y_j)` for running maxima `M_i`.
pub fn joint_max_cdf(d: &DistributionSpec, ys: &[f64]) -> Result<LawValue, LawError> {
    if ys.is_empty() {
        return Err(LawError::EmptyTuple);
    }
    let mut running = f64::INFINITY;
    let mut value = 1.0;
    for &y in ys.iter().rev() {
        running = running.min(y);
        value *= d.cdf(running);
    }
    Ok(LawValue::inside(FormulaId::Pex1, value))
}

/// Joint cdf of `(X(1), ..., X(n))` as a sum over record-time tuples
/// `1 = l_1 < ... < l_n <= horizon` of `prod_j F(y*_j)^(l_j - l_{j-1})`
/// weighted by the record-time pmf, where `y*_j = min_{i >= j} y_i`.
///
/// The series weights each tuple by the law of running maxima at fixed
/// times, which matches the record cdf exactly when `y_n` is the smallest
/// threshold (e.g. the marginal cdf of `X(n)` with `y_i = +inf` for `i < n`).
/// `truncation_mass` is the record-time probability of the omitted tuples.
pub fn record_joint_cdf_truncated(d: &DistributionSpec, ys: &[f64], horizon: u64) -> Result<TruncatedLaw, LawError> {
    require_continuous(d, "record_joint_cdf_truncated")?;
    let n = ys.len();
    if n == 0 {
        return Err(LawError::EmptyTuple);
    }
    if horizon < n as u64 {
        return Err(LawError::InvalidHorizon { horizon, n });
    }
    let mut mins = ys.to_vec();
    for i in (0..n - 1).rev() {
        mins[i] = mins[i].min(mins[i + 1]);
    }
    let cdfs: Vec<f64> = mins.iter().map(|&y| d.cdf(y)).collect();
    let mut acc = Accumulator::default();
    // l_1 = 1 contributes F(y*_1)^1 and record-time weight 1.
    walk_record_times(&cdfs, 1, 1, cdfs[0], 1.0, horizon, &mut acc);
    let value = acc.value.sum();
    let truncation = (1.0 - acc.weight.sum()).max(0.0);
    Ok(TruncatedLaw { law: LawValue::inside(FormulaId::Grdmr, value), truncation_mass: truncation })
}

#[derive(Default)]
struct Accumulator {
    value: NeumaierSum,
    weight: NeumaierSum,
}

/// Compensated summation.
#[derive(Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Depth-first walk over `l_{j+1} > l_j`, carrying the product of F-powers and
/// the partial record-time weight `prod (l_i - 1)^-1`.
fn walk_record_times(
    cdfs: &[f64],
    depth: usize,
    last_time: u64,
    f_product: f64,
    partial_weight: f64,
    horizon: u64,
    acc: &mut Accumulator,
) {
    if depth == cdfs.len() {
        let weight = if depth == 1 { 1.0 } else { partial_weight / last_time as f64 };
        acc.value.add(f_product * weight);
        acc.weight.add(weight);
        return;
    }
    let remaining = (cdfs.len() - depth - 1) as u64;
    let f = cdfs[depth];
    let mut power = f_product;
    for t in last_time + 1..=horizon - remaining {
        power *= f;
        walk_record_times(cdfs, depth + 1, t, power, partial_weight / (t - 1) as f64, horizon, acc);
    }
}

/// Probability that no record follows the first one: the mass of the upper
/// endpoint when it is an atom, otherwise zero.
pub fn prob_no_further_record(d: &DistributionSpec) -> LawValue {
    LawValue::inside(FormulaId::Nrec03, d.endpoints().uep_atom_mass)
}

/// `int_{z < x_1 < ... < x_{n-1} < y} prod r(x_i) dx = (R(y) - R(z))^(n-1) / (n-1)!`;
/// `z = None` stands for the lower endpoint.
pub fn hazard_simplex_integral(d: &DistributionSpec, n: usize, z: Option<f64>, y: f64) -> Result<f64, LawError> {
    require_continuous(d, "hazard_simplex_integral")?;
    if n == 0 {
        return Err(LawError::InvalidIndices);
    }
    if let Some(z) = z {
        if z >= y {
            return Err(DistError::Domain { x: z, reason: "lower bound must be below the upper bound" }.into());
        }
    }
    let r_y = d.cum_hazard(y)?;
    let r_z = match z {
        Some(z) => d.cum_hazard(z)?,
        None => 0.0,
    };
    Ok((r_y - r_z).powi(n as i32 - 1) / gamma_of_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn exp1() -> DistributionSpec {
        DistributionSpec::exponential(1.0).unwrap()
    }

    fn unif() -> DistributionSpec {
        DistributionSpec::uniform(0.0, 1.0).unwrap()
    }

    #[test]
    fn interrecord_examples() {
        assert_eq!(interrecord_joint_pmf_exact(&[1]).unwrap(), q(1, 2));
        assert_eq!(interrecord_joint_pmf_exact(&[1, 1]).unwrap(), q(1, 6));
        assert_eq!(interrecord_joint_pmf_exact(&[2, 3]).unwrap(), q(1, 60));
        for k in 1..=20u64 {
            assert_eq!(interrecord_joint_pmf_exact(&[k]).unwrap(), q(1, (k * (k + 1)) as i64));
            for l in 1..=20u64 {
                assert_eq!(interrecord_joint_pmf_exact(&[k, l]).unwrap(), q(1, (k * (k + l) * (k + l + 1)) as i64));
            }
        }
        assert_eq!(interrecord_joint_pmf(&[0, 2]), Err(LawError::InvalidGap));
        assert_eq!(interrecord_joint_pmf(&[]), Err(LawError::EmptyTuple));
        assert_eq!(interrecord_joint_pmf(&[1]).unwrap().value, 0.5);
    }

    #[test]
    fn interrecord_partial_sums_approach_one() {
        let total: f64 = (1..=10_000u64).map(|k| interrecord_joint_pmf(&[k]).unwrap().value).sum();
        assert!(close(total, 1.0, 1e-3));
    }

    #[test]
    fn record_time_examples() {
        assert_eq!(record_times_joint_pmf_exact(&[2]).unwrap(), q(1, 2));
        assert_eq!(record_times_joint_pmf_exact(&[2, 3]).unwrap(), q(1, 6));
        assert_eq!(record_times_joint_pmf_exact(&[3, 5]).unwrap(), q(1, 40));
        assert_eq!(record_times_joint_pmf(&[1, 3]), Err(LawError::InvalidTimes));
        assert_eq!(record_times_joint_pmf(&[3, 3]), Err(LawError::InvalidTimes));
    }

    #[test]
    fn transition_examples() {
        assert_eq!(record_time_transition_exact(2, 3), q(1, 3));
        assert_eq!(record_time_transition_pmf(2, 2).value, 0.0);
        assert!(!record_time_transition_pmf(2, 2).support_flag);
        // telescoping: sum_{j>k} k/(j(j-1)) = 1, partial sum up to J is 1 - k/J
        let s: f64 = (6..=1_000_000u64).map(|j| record_time_transition_pmf(5, j).value).sum();
        assert!(close(s, 1.0, 1e-5));
        // ratio of consecutive record-time pmfs
        let ratio = record_times_joint_pmf_exact(&[2, 3]).unwrap() / record_times_joint_pmf_exact(&[2]).unwrap();
        assert_eq!(ratio, record_time_transition_exact(2, 3));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_integral_exact(&[4]).unwrap(), q(1, 4));
        assert_eq!(gamma_integral_exact(&[3, 2]).unwrap(), q(1, 15));
        assert_eq!(gamma_integral_exact(&[1, 1, 1]).unwrap(), q(1, 6));
        assert_eq!(gamma_integral(&[1, 0]), Err(LawError::InvalidExponent));
    }

    #[test]
    fn marginal_pdf_examples() {
        let v = record_value_marginal_pdf(&exp1(), 2, 1.0).unwrap();
        assert!(close(v.value, (-1f64).exp(), 1e-15));
        assert_eq!(v.formula_id, FormulaId::Adr3);
        let v = record_value_marginal_pdf(&exp1(), 3, 2.0).unwrap();
        assert!(close(v.value, 2.0 * (-2f64).exp(), 1e-15));
        for d in [exp1(), unif()] {
            for x in [0.1, 0.4, 0.7] {
                assert_eq!(record_value_marginal_pdf(&d, 1, x).unwrap().value, d.pdf(x));
            }
        }
        let off = record_value_marginal_pdf(&unif(), 2, 1.5).unwrap();
        assert!(!off.support_flag && off.value == 0.0);
        assert!(matches!(
            record_value_marginal_pdf(&DistributionSpec::geometric(0.5).unwrap(), 2, 2.0),
            Err(LawError::UnsupportedVariant(..))
        ));
    }

    #[test]
    fn marginal_matches_gamma_density_on_exponential() {
        for n in 1..=6usize {
            for x in [0.3f64, 1.0, 2.5, 6.0] {
                let gamma = x.powi(n as i32 - 1) * (-x).exp() / gamma_of_integer(n);
                assert!(close(record_value_marginal_pdf(&exp1(), n, x).unwrap().value, gamma, 1e-14));
            }
        }
    }

    #[test]
    fn joint_pdf_examples() {
        let theta = 2.0;
        let d = DistributionSpec::exponential(theta).unwrap();
        let xs = [0.1, 0.5, 0.9, 1.7];
        let v = record_value_joint_pdf(&d, &xs).unwrap();
        assert!(close(v.value, theta.powi(4) * (-theta * 1.7).exp(), 1e-14));
        let v = record_value_joint_pdf(&d, &[0.5, 0.1]).unwrap();
        assert!(!v.support_flag && v.value == 0.0);
        let v = record_value_joint_pdf(&unif(), &[0.2, 0.5]).unwrap();
        assert!(close(v.value, 1.25, 1e-15));
    }

    #[test]
    fn subvector_pdf_examples() {
        for d in [exp1(), unif()] {
            let a = record_value_subvector_pdf(&d, &[1, 2], &[0.2, 0.6]).unwrap();
            let b = record_value_joint_pdf(&d, &[0.2, 0.6]).unwrap();
            assert!(close(a.value, b.value, 1e-15));
            let a = record_value_subvector_pdf(&d, &[1, 2, 3], &[0.1, 0.3, 0.6]).unwrap();
            let b = record_value_joint_pdf(&d, &[0.1, 0.3, 0.6]).unwrap();
            assert!(close(a.value, b.value, 1e-15));
        }
        for x in [0.5, 1.0, 3.0] {
            let a = record_value_subvector_pdf(&exp1(), &[2], &[x]).unwrap().value;
            assert!(close(a, x * (-x).exp(), 1e-15));
            let a = record_value_subvector_pdf(&exp1(), &[4], &[x]).unwrap().value;
            assert!(close(a, record_value_marginal_pdf(&exp1(), 4, x).unwrap().value, 1e-15));
        }
        let v = record_value_subvector_pdf(&exp1(), &[1, 3], &[1.0, 2.0]).unwrap();
        assert!(close(v.value, (-2f64).exp(), 1e-15));
        assert_eq!(
            record_value_subvector_pdf(&exp1(), &[1, 3], &[1.0]),
            Err(LawError::ShapeMismatch { indices: 2, values: 1 })
        );
        assert_eq!(record_value_subvector_pdf(&exp1(), &[2, 2], &[1.0, 2.0]), Err(LawError::InvalidIndices));
    }

    #[test]
    fn discrete_pmf_examples() {
        let g = DistributionSpec::geometric(0.5).unwrap();
        for y in 1..8 {
            assert_eq!(discrete_record_pmf(&g, 1, y as f64).unwrap().value, g.pdf(y as f64));
        }
        assert!(close(discrete_record_pmf(&g, 2, 2.0).unwrap().value, 0.25, 1e-15));
        let u3 = DistributionSpec::discrete_uniform(3).unwrap();
        assert!(close(discrete_record_pmf(&u3, 2, 3.0).unwrap().value, 0.5, 1e-15));
        assert!(matches!(discrete_record_pmf(&u3, 2, 2.5), Err(LawError::OffSupport(_))));
        assert!(matches!(discrete_record_pmf(&u3, 66, 3.0), Err(LawError::DegreeTooLarge(65))));
        let v = discrete_record_pmf(&u3, 3, 2.0).unwrap();
        assert!(!v.support_flag && v.value == 0.0);
    }

    #[test]
    fn discrete_exact_matches_float() {
        let law = ExactDiscreteLaw::Finite { support: vec![1, 2, 3], probs: vec![q(1, 3); 3] };
        assert_eq!(discrete_record_pmf_exact(&law, 2, 3).unwrap(), q(1, 2));
        let g = ExactDiscreteLaw::geometric(1, 2);
        assert_eq!(discrete_record_pmf_exact(&g, 2, 2).unwrap(), q(1, 4));
        let gf = DistributionSpec::geometric(0.5).unwrap();
        for n in 1..5 {
            for y in n..12 {
                let exact = ratio_to_f64(&discrete_record_pmf_exact(&g, n, y as i64).unwrap());
                let float = discrete_record_pmf(&gf, n, y as f64).unwrap().value;
                assert!(close(exact, float, 1e-14), "n={n} y={y}");
            }
        }
    }

    #[test]
    fn geometric_joint_pmf_closed_form() {
        let g = ExactDiscreteLaw::geometric(1, 2);
        assert_eq!(discrete_record_joint_pmf_exact(&g, &[1, 2]).unwrap(), q(1, 4));
        assert_eq!(discrete_record_joint_pmf_exact(&g, &[2, 2]).unwrap(), q(0, 1));
        let gf = DistributionSpec::geometric(0.5).unwrap();
        assert!(close(discrete_record_joint_pmf(&gf, &[1.0, 2.0]).unwrap().value, 0.25, 1e-15));
        let rep = discrete_record_joint_pmf(&gf, &[2.0, 2.0]).unwrap();
        assert!(!rep.support_flag && rep.value == 0.0);
        // (p/q)^(n-1) q^(kn-1) p and (p/q)^n q^kn agree
        let (p, qq) = (q(1, 4), q(3, 4));
        for n in 1..5usize {
            for kn in n as i64..12 {
                let a = num::pow(&p / &qq, n - 1) * num::pow(qq.clone(), kn as usize - 1) * &p;
                let b = num::pow(&p / &qq, n) * num::pow(qq.clone(), kn as usize);
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn finite_upper_endpoint_stops_records() {
        let u3 = DistributionSpec::discrete_uniform(3).unwrap();
        let v = discrete_record_joint_pmf(&u3, &[3.0, 4.0]).unwrap();
        assert!(!v.support_flag);
        let v = discrete_record_joint_pmf(&u3, &[1.0, 3.0]).unwrap();
        assert!(close(v.value, 0.5 * (1.0 / 3.0), 1e-15));
    }

    #[test]
    fn joint_max_examples() {
        let u = unif();
        assert_eq!(joint_max_cdf(&u, &[0.3]).unwrap().value, 0.3);
        assert!(close(joint_max_cdf(&u, &[0.5, 0.5]).unwrap().value, 0.25, 1e-15));
        assert!(close(joint_max_cdf(&u, &[0.9, 0.1]).unwrap().value, 0.01, 1e-15));
        assert!(close(joint_max_cdf(&u, &[0.2, 0.9, 0.5]).unwrap().value, 0.2 * 0.5 * 0.5, 1e-15));
    }

    #[test]
    fn truncated_record_cdf() {
        let u = unif();
        let one = record_joint_cdf_truncated(&u, &[0.37], 10).unwrap();
        assert_eq!(one.law.value, 0.37);
        assert_eq!(one.truncation_mass, 0.0);
        let r = record_joint_cdf_truncated(&u, &[1.0, 0.5], 200).unwrap();
        let target = 0.5 + 0.5 * 0.5f64.ln();
        assert!(r.law.value <= target + 1e-12);
        assert!(target - r.law.value <= r.truncation_mass);
        assert!(close(r.truncation_mass, 1.0 / 200.0, 1e-12));
        let mut last = f64::INFINITY;
        for h in [3u64, 5, 10, 40, 100] {
            let t = record_joint_cdf_truncated(&u, &[0.9, 0.8, 0.7], h).unwrap().truncation_mass;
            assert!(t < last);
            last = t;
        }
        assert!(matches!(record_joint_cdf_truncated(&u, &[0.5, 0.5, 0.5], 2), Err(LawError::InvalidHorizon { .. })));
    }

    #[test]
    fn no_further_record_examples() {
        let d6 = DistributionSpec::discrete_uniform(6).unwrap();
        assert!(close(prob_no_further_record(&d6).value, 1.0 / 6.0, 1e-15));
        assert_eq!(prob_no_further_record(&exp1()).value, 0.0);
        assert_eq!(prob_no_further_record(&unif()).value, 0.0);
    }

    #[test]
    fn hazard_simplex_examples() {
        assert_eq!(hazard_simplex_integral(&exp1(), 1, Some(0.0), 2.0).unwrap(), 1.0);
        assert!(close(hazard_simplex_integral(&exp1(), 3, Some(0.0), 2.0).unwrap(), 2.0, 1e-15));
        assert!(close(hazard_simplex_integral(&exp1(), 3, None, 2.0).unwrap(), 2.0, 1e-15));
        assert!(close(hazard_simplex_integral(&unif(), 2, Some(0.25), 0.5).unwrap(), 1.5f64.ln(), 1e-15));
        assert!(hazard_simplex_integral(&unif(), 2, Some(0.5), 0.5).is_err());
        assert!(hazard_simplex_integral(&unif(), 2, None, 1.0).is_err());
    }

    #[test]
    fn symmetric_polynomial_matches_subsets() {
        let v = [0.5, 2.0, 3.0, 0.25];
        assert_eq!(elementary_symmetric(&v, 0), 1.0);
        assert!(close(elementary_symmetric(&v, 1), 5.75, 1e-14));
        let mut e2 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                e2 += v[i] * v[j];
            }
        }
        assert!(close(elementary_symmetric(&v, 2), e2, 1e-14));
        assert!(close(elementary_symmetric(&v, 4), 0.75, 1e-14));
        assert_eq!(elementary_symmetric(&v, 5), 0.0);
    }

    #[test]
    fn formula_ids_round_trip() {
        for f in FormulaId::ALL {
            assert_eq!(f.as_str().parse::<FormulaId>().unwrap(), f);
            assert_eq!(serde_json::to_string(&f).unwrap(), format!("\"{}\"", f.as_str()));
        }
    }
}
