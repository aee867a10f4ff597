//! Monte-Carlo simulation of records.
//!
//! Every trial draws from its own ChaCha8 stream selected by
//! `(seed, trial index)`, so a report depends only on the seed and the set
//! of trial indices, never on scheduling or thread count. Trials run in
//! parallel and are reduced in index order.

use std::ops::Range;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::dist::{DistError, DistributionSpec};
use crate::extract::{ExtractorState, RecordSequence};
use crate::order::{ProductOrder, RealLine, RecordKind};

/// Minimum sample size accepted by the goodness-of-fit tests.
pub const MIN_GOF_SAMPLES: usize = 1000;
/// Minimum number of conditioning hits for a conditional estimate.
pub const MIN_CONDITIONING_HITS: u64 = 1000;
/// Threshold on `|rho| * sqrt(N)` for the correlation test.
pub const CORRELATION_Z_THRESHOLD: f64 = 4.0;
/// Default significance level of the chi-square and Kolmogorov-Smirnov tests.
pub const DEFAULT_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { got: usize, need: usize },
    #[error("samples have zero variance")]
    ZeroVariance,
    #[error("only {0} trials satisfied the conditioning event")]
    TooFewConditioningHits(u64),
    #[error("{0}")]
    UnsupportedVariant(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Dist(#[from] DistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub trials: u64,
    /// Maximum observations per trial.
    pub horizon: u64,
    pub seed: u64,
    /// Stop a trial once this many records were seen.
    pub target_records: Option<usize>,
}

impl McConfig {
    pub fn new(trials: u64, horizon: u64, seed: u64) -> Self {
        McConfig { trials, horizon, seed, target_records: None }
    }

    pub fn until_records(mut self, n: usize) -> Self {
        self.target_records = Some(n);
        self
    }

    fn validate(&self) -> Result<(), McError> {
        if self.trials == 0 {
            return Err(McError::InvalidConfig("trials must be >= 1"));
        }
        if self.horizon == 0 {
            return Err(McError::InvalidConfig("horizon must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McReport {
    pub estimate: f64,
    pub stderr: f64,
    pub trials_used: u64,
    /// Fraction of trials left undecided by the horizon, or a bound on it.
    pub truncation_mass: f64,
    pub seed: u64,
}

impl McReport {
    /// Proportion `hits / n` over `n` decided trials.
    pub fn from_counts(hits: u64, n: u64, seed: u64) -> Self {
        let (estimate, stderr) = proportion(hits, n);
        McReport { estimate, stderr, trials_used: n, truncation_mass: 0.0, seed }
    }

    /// Whether `value` lies within `k` binomial standard errors `sqrt(value (1 - value) / n)`
    /// of a proportion estimate. Unlike the sample standard error this does not
    /// vanish when no trial hit the event.
    pub fn within_binomial(&self, value: f64, k: f64) -> bool {
        let se = (value * (1.0 - value) / self.trials_used as f64).sqrt();
        (self.estimate - value).abs() <= k * se
    }

    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.stderr
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GofTest {
    ChiSquare,
    KolmogorovSmirnov,
    CorrelationZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GofReport {
    pub test: GofTest,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Significance level the threshold corresponds to; NaN for the fixed correlation threshold.
    pub alpha: f64,
    /// Cells after pooling (chi-square) or sample size.
    pub cells_or_n: usize,
}

impl GofReport {
    fn new(test: GofTest, statistic: f64, threshold: f64, alpha: f64, cells_or_n: usize) -> Self {
        GofReport { test, statistic, threshold, pass: statistic <= threshold, alpha, cells_or_n }
    }
}

/// Random stream of one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform draw in the open interval (0, 1).
pub fn open_unit(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Derives an independent seed for a named sub-experiment.
pub fn sub_seed(seed: u64, label: &str) -> u64 {
    // FNV-1a over the label, then a splitmix64 finalizer
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Records observed in one simulated trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome<E> {
    pub trial: u64,
    pub records: RecordSequence<E>,
    /// False when `target_records` was set and not reached within the horizon.
    pub decided: bool,
}

/// Simulates one iid trial on the real line.
pub fn simulate_trial(d: &DistributionSpec, kind: RecordKind, cfg: &McConfig, trial: u64) -> TrialOutcome<f64> {
    let mut rng = trial_rng(cfg.seed, trial);
    let mut state = ExtractorState::new(RealLine, kind);
    let mut events = Vec::new();
    let target = cfg.target_records.unwrap_or(usize::MAX);
    while state.clock() < cfg.horizon && events.len() < target {
        let x = d.quantile(open_unit(&mut rng)).expect("open unit draw lies in (0,1)");
        if let Some(ev) = state.feed(x).expect("quantiles are never NaN") {
            events.push(ev);
        }
    }
    let decided = cfg.target_records.is_none_or(|n| events.len() >= n);
    TrialOutcome { trial, records: RecordSequence::new(kind, events, state.clock()), decided }
}

/// Simulates one trial in `R^d` with independent coordinates drawn from `marginals`.
pub fn simulate_vector_trial(
    marginals: &[DistributionSpec],
    kind: RecordKind,
    cfg: &McConfig,
    trial: u64,
) -> TrialOutcome<Vec<f64>> {
    let mut rng = trial_rng(cfg.seed, trial);
    let mut state = ExtractorState::new(ProductOrder::new(marginals.len()), kind);
    let mut events = Vec::new();
    let target = cfg.target_records.unwrap_or(usize::MAX);
    while state.clock() < cfg.horizon && events.len() < target {
        let x: Vec<f64> =
            marginals.iter().map(|m| m.quantile(open_unit(&mut rng)).expect("open unit draw lies in (0,1)")).collect();
        if let Some(ev) = state.feed(x).expect("quantiles are never NaN") {
            events.push(ev);
        }
    }
    let decided = cfg.target_records.is_none_or(|n| events.len() >= n);
    TrialOutcome { trial, records: RecordSequence::new(kind, events, state.clock()), decided }
}

/// Lazily simulated trials `0..cfg.trials`, in order.
pub fn simulate_records<'a>(
    d: &'a DistributionSpec,
    kind: RecordKind,
    cfg: McConfig,
) -> impl Iterator<Item = TrialOutcome<f64>> + 'a {
    (0..cfg.trials).map(move |t| simulate_trial(d, kind, &cfg, t))
}

/// Runs `f` on every trial in `trials` in parallel; results are in trial order.
pub fn map_trials<T, F>(d: &DistributionSpec, kind: RecordKind, cfg: &McConfig, trials: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(TrialOutcome<f64>) -> T + Sync + Send,
{
    trials.into_par_iter().map(|t| f(simulate_trial(d, kind, cfg, t))).collect()
}

/// Samples `(X(1), ..., X(n))` as `F^-1(1 - exp(-E_j))` with `E_j` the partial
/// sums of iid unit exponentials.
pub fn renyi_sample_records(d: &DistributionSpec, n: usize, cfg: &McConfig) -> Result<Vec<Vec<f64>>, McError> {
    cfg.validate()?;
    if !d.is_continuous() {
        return Err(McError::UnsupportedVariant("the exponential representation needs a continuous law"));
    }
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let mut e = 0.0;
            (0..n)
                .map(|_| {
                    e += -open_unit(&mut rng).ln();
                    d.inverse_cum_hazard(e).map_err(McError::from)
                })
                .collect()
        })
        .collect()
}

/// Proportion estimate from per-trial outcomes; `None` marks an undecided trial,
/// which is left out of the estimate and counted in `truncation_mass`.
pub fn estimate_pmf(outcomes: impl IntoIterator<Item = Option<bool>>, seed: u64) -> McReport {
    let (mut hits, mut decided, mut total) = (0u64, 0u64, 0u64);
    for o in outcomes {
        total += 1;
        if let Some(h) = o {
            decided += 1;
            hits += h as u64;
        }
    }
    let (estimate, stderr) = proportion(hits, decided);
    let truncation_mass = if total == 0 { 0.0 } else { (total - decided) as f64 / total as f64 };
    McReport { estimate, stderr, trials_used: decided, truncation_mass, seed }
}

fn proportion(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = hits as f64 / n as f64;
    if n == 1 {
        return (p, f64::INFINITY);
    }
    // sample standard deviation of the indicators over sqrt(n)
    let var = p * (1.0 - p) * n as f64 / (n - 1) as f64;
    (p, (var / n as f64).sqrt())
}

/// Sample mean with its standard error.
pub fn estimate_mean(values: &[f64], seed: u64) -> McReport {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { f64::NAN };
    McReport { estimate: mean, stderr: (var / n as f64).sqrt(), trials_used: n as u64, truncation_mass: 0.0, seed }
}

/// Pearson chi-square test of `observed` counts against cell probabilities.
///
/// If `probs` sums to less than one, a remainder cell holding
/// `total - sum(observed)` is appended. Adjacent cells are pooled until each
/// group expects at least `min_expected` observations.
pub fn gof_chi_square(observed: &[u64], probs: &[f64], total: u64, min_expected: f64) -> Result<GofReport, McError> {
    gof_chi_square_at(observed, probs, total, min_expected, DEFAULT_ALPHA)
}

/// [`gof_chi_square`] at significance level `alpha`.
pub fn gof_chi_square_at(
    observed: &[u64],
    probs: &[f64],
    total: u64,
    min_expected: f64,
    alpha: f64,
) -> Result<GofReport, McError> {
    check_alpha(alpha)?;
    if observed.len() != probs.len() {
        return Err(McError::InvalidConfig("observed and probs differ in length"));
    }
    let listed: u64 = observed.iter().sum();
    if total < listed {
        return Err(McError::InvalidConfig("total is smaller than the listed counts"));
    }
    if (total as usize) < MIN_GOF_SAMPLES {
        return Err(McError::InsufficientSamples { got: total as usize, need: MIN_GOF_SAMPLES });
    }
    let mut cells: Vec<(f64, f64)> = observed.iter().zip(probs).map(|(&o, &p)| (o as f64, p * total as f64)).collect();
    let rest_p = 1.0 - probs.iter().sum::<f64>();
    if rest_p > 1e-12 || total > listed {
        cells.push(((total - listed) as f64, rest_p.max(0.0) * total as f64));
    }
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut open = (0.0, 0.0);
    for (o, e) in cells {
        open.0 += o;
        open.1 += e;
        if open.1 >= min_expected {
            groups.push(open);
            open = (0.0, 0.0);
        }
    }
    if open.0 > 0.0 || open.1 > 0.0 {
        match groups.last_mut() {
            Some(last) => {
                last.0 += open.0;
                last.1 += open.1;
            }
            None => groups.push(open),
        }
    }
    if groups.len() < 2 {
        return Err(McError::InsufficientSamples { got: groups.len(), need: 2 });
    }
    let statistic = groups.iter().map(|&(o, e)| (o - e).powi(2) / e).sum();
    let df = (groups.len() - 1) as f64;
    let threshold = ChiSquared::new(df).expect("positive degrees of freedom").inverse_cdf(1.0 - alpha);
    Ok(GofReport::new(GofTest::ChiSquare, statistic, threshold, alpha, groups.len()))
}

fn check_sample(samples: &[f64]) -> Result<(), McError> {
    if samples.len() < MIN_GOF_SAMPLES {
        return Err(McError::InsufficientSamples { got: samples.len(), need: MIN_GOF_SAMPLES });
    }
    if samples.iter().all(|&x| x == samples[0]) {
        return Err(McError::ZeroVariance);
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<(), McError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(McError::InvalidConfig("alpha must lie in (0, 1)"))
    }
}

/// Asymptotic Kolmogorov-Smirnov critical value `sqrt(-ln(alpha / 2) / 2)`; about 1.63 at 0.01.
pub fn ks_critical_value(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// One-sample Kolmogorov-Smirnov test at alpha = 0.01; threshold about `1.63 / sqrt(N)`.
pub fn gof_ks(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<GofReport, McError> {
    gof_ks_at(samples, cdf, DEFAULT_ALPHA)
}

/// [`gof_ks`] at significance level `alpha`.
pub fn gof_ks_at(samples: &[f64], cdf: impl Fn(f64) -> f64, alpha: f64) -> Result<GofReport, McError> {
    check_alpha(alpha)?;
    check_sample(samples)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    Ok(GofReport::new(GofTest::KolmogorovSmirnov, d, ks_critical_value(alpha) / n.sqrt(), alpha, sorted.len()))
}

/// Two-sample Kolmogorov-Smirnov test at alpha = 0.01; threshold about `1.63 * sqrt((n + m) / (n m))`.
pub fn gof_ks_two_sample(a: &[f64], b: &[f64]) -> Result<GofReport, McError> {
    gof_ks_two_sample_at(a, b, DEFAULT_ALPHA)
}

/// [`gof_ks_two_sample`] at significance level `alpha`.
pub fn gof_ks_two_sample_at(a: &[f64], b: &[f64], alpha: f64) -> Result<GofReport, McError> {
    check_alpha(alpha)?;
    check_sample(a)?;
    check_sample(b)?;
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let (nf, mf) = (n as f64, m as f64);
    let threshold = ks_critical_value(alpha) * ((nf + mf) / (nf * mf)).sqrt();
    Ok(GofReport::new(GofTest::KolmogorovSmirnov, d, threshold, alpha, n + m))
}

/// Correlation test of paired samples: `|rho| * sqrt(N)` against 4.
pub fn increment_independence(xs: &[f64], ys: &[f64]) -> Result<GofReport, McError> {
    if xs.len() != ys.len() {
        return Err(McError::InvalidConfig("paired samples differ in length"));
    }
    check_sample(xs)?;
    check_sample(ys)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    let rho = sxy / (sxx * syy).sqrt();
    Ok(GofReport::new(GofTest::CorrelationZ, rho.abs() * n.sqrt(), CORRELATION_Z_THRESHOLD, f64::NAN, xs.len()))
}

/// Estimates the probability that no record ever follows the first
/// observation. A trial whose first value is the (atomic) upper endpoint is a
/// hit; a later strictly larger value is a miss; otherwise it is undecided.
/// `truncation_mass` averages the undecided probability `F(x_1)^(horizon - 1)`
/// over trials.
pub fn estimate_no_further_record(d: &DistributionSpec, cfg: &McConfig) -> Result<McReport, McError> {
    cfg.validate()?;
    if !d.is_discrete() {
        return Err(McError::UnsupportedVariant("no-further-record estimation needs a discrete law"));
    }
    let ends = d.endpoints();
    let atom = ends.uep.is_finite() && ends.uep_atom_mass > 0.0;
    let per_trial: Vec<(Option<bool>, f64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let first = d.quantile(open_unit(&mut rng)).expect("open unit draw lies in (0,1)");
            if atom && first == ends.uep {
                return (Some(true), 0.0);
            }
            let undecided_bound = d.cdf(first).powf((cfg.horizon - 1) as f64);
            for _ in 1..cfg.horizon {
                if d.quantile(open_unit(&mut rng)).expect("open unit draw lies in (0,1)") > first {
                    return (Some(false), undecided_bound);
                }
            }
            (None, undecided_bound)
        })
        .collect();
    let bound = per_trial.iter().map(|p| p.1).sum::<f64>() / cfg.trials as f64;
    let mut report = estimate_pmf(per_trial.iter().map(|p| p.0), cfg.seed);
    report.truncation_mass = report.truncation_mass.max(bound);
    Ok(report)
}

/// Estimates `P(next record at time j | time k is a record)` for iid vectors
/// with independent coordinates under the componentwise order, by rejection
/// on the conditioning event.
pub fn estimate_poset_transition(
    marginals: &[DistributionSpec],
    k: u64,
    j: u64,
    cfg: &McConfig,
) -> Result<McReport, McError> {
    cfg.validate()?;
    if marginals.is_empty() {
        return Err(McError::InvalidConfig("need at least one coordinate"));
    }
    if k == 0 {
        return Err(McError::InvalidConfig("record times start at 1"));
    }
    if j <= k {
        return Ok(McReport { estimate: 0.0, stderr: 0.0, trials_used: 0, truncation_mass: 0.0, seed: cfg.seed });
    }
    if cfg.horizon < j {
        return Err(McError::InvalidConfig("horizon must reach time j"));
    }
    let sim = McConfig { horizon: j, target_records: None, ..*cfg };
    let outcomes: Vec<Option<bool>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let out = simulate_vector_trial(marginals, RecordKind::StrongUpper, &sim, t);
            let times: Vec<u64> = out.records.times().collect();
            let pos = times.iter().position(|&t| t == k)?;
            Some(times.get(pos + 1) == Some(&j))
        })
        .collect();
    let hits = outcomes.iter().filter(|o| o.is_some()).count() as u64;
    if hits < MIN_CONDITIONING_HITS {
        return Err(McError::TooFewConditioningHits(hits));
    }
    let mut report = estimate_pmf(outcomes.into_iter().flatten().map(Some), cfg.seed);
    report.truncation_mass = 0.0;
    Ok(report)
}

/// Empirical distribution of the number of records among the first `horizon`
/// observations: `pmf[c]` estimates `P(N(horizon) = c)`.
pub fn record_count_pmf(d: &DistributionSpec, kind: RecordKind, cfg: &McConfig) -> Result<Vec<f64>, McError> {
    cfg.validate()?;
    let sim = McConfig { target_records: None, ..*cfg };
    let counts = map_trials(d, kind, &sim, 0..cfg.trials, |o| o.records.count);
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut pmf = vec![0.0; max + 1];
    for c in counts {
        pmf[c] += 1.0 / cfg.trials as f64;
    }
    Ok(pmf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unif() -> DistributionSpec {
        DistributionSpec::uniform(0.0, 1.0).unwrap()
    }

    #[test]
    fn open_unit_stays_inside() {
        let mut rng = trial_rng(1, 2);
        for _ in 0..10_000 {
            let u = open_unit(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn streams_are_keyed_by_seed_and_trial() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(trial_rng(7, 3).next_u64(), trial_rng(7, 4).next_u64());
        assert_ne!(trial_rng(7, 3).next_u64(), trial_rng(8, 3).next_u64());
        assert_ne!(sub_seed(7, "a"), sub_seed(7, "b"));
    }

    #[test]
    fn first_gap_of_uniform() {
        let cfg = McConfig::new(100_000, 10_000, 11).until_records(2);
        let d = unif();
        let outcomes = map_trials(&d, RecordKind::StrongUpper, &cfg, 0..cfg.trials, |o| {
            o.decided.then(|| o.records.deltas[0] == 1)
        });
        let r = estimate_pmf(outcomes, cfg.seed);
        assert!(r.within(0.5, 4.0), "{r:?}");
    }

    #[test]
    fn single_atom_gives_one_record() {
        let d = DistributionSpec::finite(vec![3.0], vec![1.0]).unwrap();
        let cfg = McConfig::new(200, 50, 1);
        for o in simulate_records(&d, RecordKind::StrongUpper, cfg) {
            assert_eq!(o.records.count, 1);
        }
        let r = estimate_no_further_record(&d, &cfg).unwrap();
        assert_eq!(r.estimate, 1.0);
    }

    #[test]
    fn parallel_map_matches_sequential_and_merges() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        let cfg = McConfig::new(500, 1000, 99);
        let seq: Vec<usize> = simulate_records(&d, RecordKind::StrongUpper, cfg).map(|o| o.records.count).collect();
        let par = map_trials(&d, RecordKind::StrongUpper, &cfg, 0..500, |o| o.records.count);
        assert_eq!(seq, par);
        let mut split = map_trials(&d, RecordKind::StrongUpper, &cfg, 0..123, |o| o.records.count);
        split.extend(map_trials(&d, RecordKind::StrongUpper, &cfg, 123..500, |o| o.records.count));
        assert_eq!(split, par);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| map_trials(&d, RecordKind::StrongUpper, &cfg, 0..500, |o| o.records.count));
        assert_eq!(single, par);
    }

    #[test]
    fn renyi_first_record_is_plain_sample() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        let cfg = McConfig::new(5000, 1, 3);
        let s = renyi_sample_records(&d, 1, &cfg).unwrap();
        let first: Vec<f64> = s.iter().map(|v| v[0]).collect();
        assert!(gof_ks(&first, |x| d.cdf(x)).unwrap().pass);
        assert!(renyi_sample_records(&DistributionSpec::geometric(0.5).unwrap(), 2, &cfg).is_err());
        for v in renyi_sample_records(&unif(), 4, &cfg).unwrap() {
            assert!(v.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn renyi_second_record_on_uniform() {
        let d = unif();
        let cfg = McConfig::new(100_000, 1, 5);
        let s = renyi_sample_records(&d, 2, &cfg).unwrap();
        let r = estimate_pmf(s.iter().map(|v| Some(v[1] <= 0.5)), cfg.seed);
        assert!(r.within(0.5 - 0.5 * 2f64.ln(), 4.0), "{r:?}");
    }

    fn record_values(d: &DistributionSpec, trials: u64, records: usize, seed: u64) -> Vec<Vec<f64>> {
        let cfg = McConfig::new(trials, 1_000_000, seed).until_records(records);
        map_trials(d, RecordKind::StrongUpper, &cfg, 0..trials, |o| {
            o.decided.then(|| o.records.events.iter().map(|e| e.value).collect::<Vec<f64>>())
        })
        .into_iter()
        .flatten()
        .collect()
    }

    #[test]
    fn renyi_matches_direct_simulation() {
        // ten two-sample tests share a 1% false-alarm budget
        for d in [unif(), DistributionSpec::exponential(1.0).unwrap()] {
            let direct = record_values(&d, 4000, 5, 31);
            let renyi = renyi_sample_records(&d, 5, &McConfig::new(4000, 1, 32)).unwrap();
            for n in 0..5 {
                let a: Vec<f64> = direct.iter().map(|v| v[n]).collect();
                let b: Vec<f64> = renyi.iter().map(|v| v[n]).collect();
                let r = gof_ks_two_sample_at(&a, &b, 0.001).unwrap();
                assert!(r.pass, "{} n={}: {r:?}", d.label(), n + 1);
            }
        }
    }

    #[test]
    fn exponential_record_values_are_markov() {
        // X(n+1) - X(n) is independent of X(n-1)
        let d = DistributionSpec::exponential(1.0).unwrap();
        let values = record_values(&d, 20_000, 4, 41);
        for n in 2..=3 {
            let before: Vec<f64> = values.iter().map(|v| v[n - 2]).collect();
            let step: Vec<f64> = values.iter().map(|v| v[n] - v[n - 1]).collect();
            let r = increment_independence(&before, &step).unwrap();
            assert!(r.pass, "n={n}: {r:?}");
        }
        // and X(n) itself is not
        let first: Vec<f64> = values.iter().map(|v| v[0]).collect();
        let third: Vec<f64> = values.iter().map(|v| v[2]).collect();
        assert!(!increment_independence(&first, &third).unwrap().pass);
    }

    #[test]
    fn chi_square_pools_and_decides() {
        let probs = [0.5, 0.3, 0.15, 0.049, 0.001];
        let obs = [5012, 2990, 1490, 500, 8];
        let r = gof_chi_square(&obs, &probs, 10_000, 5.0).unwrap();
        assert!(r.pass, "{r:?}");
        let bad = gof_chi_square(&[6000, 2000, 1500, 490, 10], &probs, 10_000, 5.0).unwrap();
        assert!(!bad.pass);
        // remainder cell appended: cells 0.5, 0.25 and the rest 0.25
        let r = gof_chi_square(&[500, 250], &[0.5, 0.25], 1000, 5.0).unwrap();
        assert_eq!(r.cells_or_n, 3);
        assert!(r.statistic.abs() < 1e-12);
        // tiny trailing cells fold into the last group
        let r = gof_chi_square(&[999, 1], &[0.999, 0.001], 1000, 5.0).unwrap_err();
        assert!(matches!(r, McError::InsufficientSamples { .. }));
        assert!(matches!(gof_chi_square(&[10], &[1.0], 10, 5.0), Err(McError::InsufficientSamples { .. })));
    }

    #[test]
    fn ks_critical_values() {
        assert!((ks_critical_value(0.01) - 1.63).abs() < 3e-3);
        assert!((ks_critical_value(0.05) - 1.358).abs() < 1e-3);
        assert!(gof_ks_at(&[0.1; 2000], |x| x, 0.0).is_err());
    }

    #[test]
    fn ks_tests() {
        let d = DistributionSpec::exponential(2.0).unwrap();
        let cfg = McConfig::new(20_000, 1, 8);
        let s: Vec<f64> = renyi_sample_records(&d, 1, &cfg).unwrap().into_iter().map(|v| v[0]).collect();
        assert!(gof_ks(&s, |x| d.cdf(x)).unwrap().pass);
        let wrong = DistributionSpec::exponential(2.2).unwrap();
        assert!(!gof_ks(&s, |x| wrong.cdf(x)).unwrap().pass);
        let cfg2 = McConfig::new(20_000, 1, 9);
        let s2: Vec<f64> = renyi_sample_records(&d, 1, &cfg2).unwrap().into_iter().map(|v| v[0]).collect();
        assert!(gof_ks_two_sample(&s, &s2).unwrap().pass);
        let shifted: Vec<f64> = s2.iter().map(|x| x + 0.1).collect();
        assert!(!gof_ks_two_sample(&s, &shifted).unwrap().pass);
        assert_eq!(gof_ks(&vec![1.0; 2000], |x| x), Err(McError::ZeroVariance));
        assert!(matches!(gof_ks(&[0.5; 10], |x| x), Err(McError::InsufficientSamples { .. })));
    }

    #[test]
    fn correlation_test() {
        let cfg = McConfig::new(10_000, 1, 4);
        let s = renyi_sample_records(&unif(), 2, &cfg).unwrap();
        let a: Vec<f64> = s.iter().map(|v| v[0]).collect();
        let b: Vec<f64> = s.iter().map(|v| v[1]).collect();
        assert!(!increment_independence(&a, &b).unwrap().pass);
        let cfg = McConfig::new(10_000, 1, 5);
        let c: Vec<f64> = renyi_sample_records(&unif(), 1, &cfg).unwrap().into_iter().map(|v| v[0]).collect();
        assert!(increment_independence(&a, &c).unwrap().pass);
        assert_eq!(increment_independence(&vec![1.0; 2000], &c[..2000]), Err(McError::ZeroVariance));
    }

    #[test]
    fn no_further_record_estimates() {
        let d6 = DistributionSpec::discrete_uniform(6).unwrap();
        let cfg = McConfig::new(50_000, 200, 6);
        let r = estimate_no_further_record(&d6, &cfg).unwrap();
        assert!(r.within(1.0 / 6.0, 4.0), "{r:?}");
        assert!(r.truncation_mass < 1e-10);
        let g = DistributionSpec::geometric(0.5).unwrap();
        let r = estimate_no_further_record(&g, &McConfig::new(5_000, 200, 6)).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert!(estimate_no_further_record(&unif(), &cfg).is_err());
    }

    #[test]
    fn poset_transitions() {
        let u = unif();
        let cfg = McConfig::new(200_000, 10, 21);
        let r = estimate_poset_transition(std::slice::from_ref(&u), 2, 3, &cfg).unwrap();
        assert!(r.within(1.0 / 3.0, 4.0), "{r:?}");
        let r = estimate_poset_transition(&[u.clone(), u.clone()], 1, 2, &cfg).unwrap();
        assert!(r.within(0.25, 4.0), "{r:?}");
        let r = estimate_poset_transition(std::slice::from_ref(&u), 3, 3, &cfg).unwrap();
        assert_eq!(r.estimate, 0.0);
        let few = McConfig::new(100, 10, 1);
        assert!(matches!(estimate_poset_transition(&[u], 2, 3, &few), Err(McError::TooFewConditioningHits(_))));
    }

    #[test]
    fn record_count_mean_is_harmonic() {
        // E N(n) = 1 + 1/2 + ... + 1/n for continuous laws
        let cfg = McConfig::new(40_000, 20, 13);
        let pmf = record_count_pmf(&unif(), RecordKind::StrongUpper, &cfg).unwrap();
        let mean: f64 = pmf.iter().enumerate().map(|(c, p)| c as f64 * p).sum();
        let harmonic: f64 = (1..=20).map(|k| 1.0 / k as f64).sum();
        assert!((mean - harmonic).abs() < 0.02, "{mean} vs {harmonic}");
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(estimate_no_further_record(&DistributionSpec::discrete_uniform(3).unwrap(), &McConfig::new(0, 5, 1))
            .is_err());
        assert!(renyi_sample_records(&unif(), 2, &McConfig::new(5, 0, 1)).is_err());
    }
}
