//! Acceptance suite: closed-form laws checked against exact enumeration,
//! quadrature and simulation, plus CSV tables of the deterministic checks.
//!
//! Every check is a pure function of the seed, so the JSON summary is
//! byte-identical across runs and thread counts.

use num::traits::{One, Pow};
use num::BigRational;
use serde::Serialize;
use serde_json::{json, Value};
use statrs::distribution::{ChiSquared, ContinuousCDF, Gamma};

use crate::dist::DistributionSpec;
use crate::extract::extract_all;
use crate::laws::{
    discrete_record_joint_pmf, discrete_record_joint_pmf_exact, gamma_integral_exact, hazard_simplex_integral,
    interrecord_joint_pmf, interrecord_joint_pmf_exact, joint_max_cdf, prob_no_further_record,
    record_time_transition_pmf, record_times_joint_pmf_exact, ExactDiscreteLaw,
};
use crate::mc::{
    estimate_no_further_record, estimate_poset_transition, gof_chi_square_at, gof_ks_at, gof_ks_two_sample_at,
    increment_independence, ks_critical_value, map_trials, open_unit, renyi_sample_records, sub_seed, trial_rng,
    GofReport, GofTest, McConfig, McReport, DEFAULT_ALPHA,
};
use crate::oracle::{
    exact_record_query, simplex_quadrature, EnumerationConfig, EnumerationTarget, QuadratureConfig, SimplexIntegrand,
    TieHandling,
};
use crate::order::{ProductOrder, RealLine, RecordKind};

/// Number of checks in the core suite.
pub const CHECK_COUNT: u32 = 11;
/// Reference seed of the suite.
pub const DEFAULT_SEED: u64 = 7;

/// Horizon for trials that must reach a given number of records.
const RECORD_HORIZON: u64 = 1_000_000;
const STDERR_BAND: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

/// Runs every check of the core suite in order.
pub fn run_suite(seed: u64) -> SuiteReport {
    let checks: Vec<CheckResult> = (1..=CHECK_COUNT).map(|id| run_check(id, seed)).collect();
    SuiteReport { suite: "core", seed, pass: checks.iter().all(|c| c.pass), checks }
}

/// Runs the listed checks (all of them when `ids` is empty).
pub fn run_suite_checks(seed: u64, ids: &[u32]) -> SuiteReport {
    if ids.is_empty() {
        return run_suite(seed);
    }
    let checks: Vec<CheckResult> = ids.iter().map(|&id| run_check(id, seed)).collect();
    SuiteReport { suite: "core", seed, pass: checks.iter().all(|c| c.pass), checks }
}

/// Runs one check by id (1 to 11).
pub fn run_check(id: u32, seed: u64) -> CheckResult {
    match id {
        1 => interrecord_single_gap(seed),
        2 => interrecord_pairs(seed),
        3 => record_time_identity(),
        4 => exponential_record_marginals(seed),
        5 => exponential_increments(seed),
        6 => geometric_records(seed),
        7 => gamma_lemma(),
        8 => hazard_integrals(),
        9 => no_further_record(seed),
        10 => joint_maxima(seed),
        11 => poset_sanity(seed),
        _ => panic!("unknown check id {id}"),
    }
}

fn result(id: u32, name: &'static str, pass: bool, detail: Value) -> CheckResult {
    CheckResult { id, name, pass, detail }
}

fn unif() -> DistributionSpec {
    DistributionSpec::uniform(0.0, 1.0).expect("valid parameters")
}

fn exp(theta: f64) -> DistributionSpec {
    DistributionSpec::exponential(theta).expect("valid parameters")
}

/// Per-test level when `tests` goodness-of-fit tests share one criterion, so
/// that the criterion as a whole keeps the default false-alarm rate.
fn family_alpha(tests: usize) -> f64 {
    DEFAULT_ALPHA / tests as f64
}

/// Threshold the same statistic would face at the default level.
fn default_level_threshold(r: &GofReport) -> f64 {
    match r.test {
        GofTest::KolmogorovSmirnov => r.threshold * ks_critical_value(DEFAULT_ALPHA) / ks_critical_value(r.alpha),
        GofTest::ChiSquare => {
            ChiSquared::new((r.cells_or_n - 1) as f64).expect("at least two cells").inverse_cdf(1.0 - DEFAULT_ALPHA)
        }
        GofTest::CorrelationZ => r.threshold,
    }
}

fn gof_json(r: &GofReport) -> Value {
    let uncorrected = default_level_threshold(r);
    json!({
        "statistic": r.statistic, "threshold": r.threshold, "alpha": r.alpha, "n": r.cells_or_n, "pass": r.pass,
        "threshold_at_default_alpha": uncorrected, "pass_at_default_alpha": r.statistic <= uncorrected,
    })
}

fn mc_json(r: &McReport) -> Value {
    json!({ "estimate": r.estimate, "stderr": r.stderr, "trials": r.trials_used })
}

/// Record values of consecutive trials, in trial order, until `need` of them
/// reached `level` records.
fn gather_records(d: &DistributionSpec, seed: u64, level: usize, need: usize) -> Vec<Vec<f64>> {
    let cfg = McConfig::new(u64::MAX, RECORD_HORIZON, seed).until_records(level);
    let mut out = Vec::new();
    let mut reached = 0;
    let mut next = 0u64;
    while reached < need {
        let batch = (need - reached) as u64 + (need as u64 / 100).max(64);
        let values = map_trials(d, RecordKind::StrongUpper, &cfg, next..next + batch, |o| {
            o.records.events.into_iter().map(|e| e.value).collect::<Vec<f64>>()
        });
        next += batch;
        for v in values {
            if reached == need {
                break;
            }
            if v.len() >= level {
                reached += 1;
            }
            out.push(v);
        }
    }
    out
}

/// Increment `j` (1-based, with `X(0) = lep`) from the first `need` trials that reached record `j`.
fn increments(trials: &[Vec<f64>], j: usize, lep: f64, need: usize) -> Vec<f64> {
    trials.iter().filter(|v| v.len() >= j).take(need).map(|v| v[j - 1] - if j == 1 { lep } else { v[j - 2] }).collect()
}

/// P(D2 = k) against the tie-bracketed enumeration on 64 equiprobable points and against simulation.
pub fn interrecord_single_gap(seed: u64) -> CheckResult {
    const TRIALS: u64 = 1_000_000;
    const DISCRETENESS: f64 = 1e-3;
    let grid = DistributionSpec::discrete_uniform(64).expect("valid parameters");
    let d = unif();
    let cfg = McConfig::new(TRIALS, 11, sub_seed(seed, "gap")).until_records(2);
    let gaps = map_trials(&d, RecordKind::StrongUpper, &cfg, 0..TRIALS, |o| o.records.deltas.first().copied());
    let mut counts = [0u64; 11];
    for k in gaps.into_iter().flatten() {
        counts[k as usize] += 1;
    }
    let mut rows = Vec::new();
    let mut pass = true;
    for k in 1..=10u64 {
        let law = interrecord_joint_pmf(&[k]).expect("positive gap").value;
        let query = |ties| {
            let cfg = EnumerationConfig::new(
                grid.clone(),
                k as usize + 1,
                EnumerationTarget::InterRecordPmf { gaps: vec![k] },
            )
            .with_ties(ties);
            exact_record_query(&cfg).expect("enumeration within bounds")
        };
        let lower = query(TieHandling::ContinuousLower);
        let upper = query(TieHandling::ContinuousUpper);
        let strong = query(TieHandling::StrongRecords);
        let slack = lower.truncation_mass.max(upper.truncation_mass) + DISCRETENESS;
        let oracle_ok = lower.probability - slack <= law && law <= upper.probability + slack;
        let mc = McReport::from_counts(counts[k as usize], TRIALS, cfg.seed);
        let mc_ok = mc.within_binomial(law, STDERR_BAND);
        pass &= oracle_ok && mc_ok;
        rows.push(json!({
            "k": k, "law": law,
            "oracle": { "lower": lower.probability, "upper": upper.probability, "strong": strong.probability,
                        "truncation": slack - DISCRETENESS, "pass": oracle_ok },
            "mc": mc_json(&mc), "mc_pass": mc_ok,
        }));
    }
    result(1, "inter-record gap law", pass, json!({ "rows": rows }))
}

/// Joint law of (D2, D3) on k, l <= 5 against a chi-square test.
pub fn interrecord_pairs(seed: u64) -> CheckResult {
    const TRIALS: u64 = 1_000_000;
    let d = unif();
    let cfg = McConfig::new(TRIALS, 11, sub_seed(seed, "pairs")).until_records(3);
    let pairs = map_trials(&d, RecordKind::StrongUpper, &cfg, 0..TRIALS, |o| {
        (o.records.deltas.len() >= 2).then(|| (o.records.deltas[0], o.records.deltas[1]))
    });
    let mut observed = vec![0u64; 25];
    for (k, l) in pairs.into_iter().flatten() {
        if k <= 5 && l <= 5 {
            observed[((k - 1) * 5 + (l - 1)) as usize] += 1;
        }
    }
    let probs: Vec<f64> = (1..=5u64)
        .flat_map(|k| (1..=5u64).map(move |l| interrecord_joint_pmf(&[k, l]).expect("positive gaps").value))
        .collect();
    match gof_chi_square_at(&observed, &probs, TRIALS, 5.0, DEFAULT_ALPHA) {
        Ok(r) => result(2, "inter-record pair law", r.pass, json!({ "chi_square": gof_json(&r) })),
        Err(e) => result(2, "inter-record pair law", false, json!({ "error": e.to_string() })),
    }
}

/// Record-time pmf equals the gap pmf under the time-to-gap shift, in rationals.
pub fn record_time_identity() -> CheckResult {
    let mut checked = 0u64;
    let mut mismatches = Vec::new();
    let mut compare = |times: &[u64]| {
        let gaps: Vec<u64> = std::iter::once(1)
            .chain(times.iter().copied())
            .collect::<Vec<_>>()
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect();
        let a = record_times_joint_pmf_exact(times).expect("valid times");
        let b = interrecord_joint_pmf_exact(&gaps).expect("valid gaps");
        checked += 1;
        if a != b {
            mismatches.push(times.to_vec());
        }
    };
    for l2 in 2..=30u64 {
        compare(&[l2]);
        for l3 in l2 + 1..=30 {
            compare(&[l2, l3]);
            for l4 in l3 + 1..=30 {
                compare(&[l2, l3, l4]);
            }
        }
    }
    let pass = mismatches.is_empty();
    result(3, "record-time law identity", pass, json!({ "tuples": checked, "mismatches": mismatches }))
}

/// Marginals of X(2), X(3), X(4) on Exponential(1) from direct simulation and the
/// exponential representation.
pub fn exponential_record_marginals(seed: u64) -> CheckResult {
    const N: usize = 100_000;
    let d = exp(1.0);
    let direct: Vec<Vec<f64>> =
        gather_records(&d, sub_seed(seed, "marginal-direct"), 4, N).into_iter().filter(|v| v.len() >= 4).collect();
    let cfg = McConfig::new(N as u64, 1, sub_seed(seed, "marginal-renyi"));
    let renyi = match renyi_sample_records(&d, 4, &cfg) {
        Ok(s) => s,
        Err(e) => return result(4, "record value marginals", false, json!({ "error": e.to_string() })),
    };
    let mut rows = Vec::new();
    let mut pass = true;
    for n in 2..=4usize {
        let gamma = Gamma::new(n as f64, 1.0).expect("valid shape");
        let a: Vec<f64> = direct.iter().map(|v| v[n - 1]).collect();
        let b: Vec<f64> = renyi.iter().map(|v| v[n - 1]).collect();
        let alpha = family_alpha(9);
        let tests = [
            gof_ks_at(&a, |x| gamma.cdf(x), alpha),
            gof_ks_at(&b, |x| gamma.cdf(x), alpha),
            gof_ks_two_sample_at(&a, &b, alpha),
        ];
        let mut row = json!({ "n": n });
        for (name, t) in ["direct", "renyi", "two_sample"].iter().zip(&tests) {
            match t {
                Ok(r) => {
                    pass &= r.pass;
                    row[*name] = gof_json(r);
                }
                Err(e) => {
                    pass = false;
                    row[*name] = json!({ "error": e.to_string() });
                }
            }
        }
        rows.push(row);
    }
    result(4, "record value marginals", pass, json!({ "decided_trials": direct.len(), "rows": rows }))
}

/// Increments of exponential records are iid Exp(theta).
pub fn exponential_increments(seed: u64) -> CheckResult {
    const N: usize = 100_000;
    const J: usize = 5;
    let mut pass = true;
    let mut per_theta = Vec::new();
    for theta in [1.0, 2.0] {
        let d = exp(theta);
        let trials = gather_records(&d, sub_seed(seed, &format!("increments-{theta}")), J, N);
        let mut ks = Vec::new();
        for j in 1..=J {
            let inc = increments(&trials, j, 0.0, N);
            match gof_ks_at(&inc, |x| d.cdf(x), family_alpha(2 * J)) {
                Ok(r) => {
                    pass &= r.pass;
                    ks.push(json!({ "j": j, "ks": gof_json(&r) }));
                }
                Err(e) => {
                    pass = false;
                    ks.push(json!({ "j": j, "error": e.to_string() }));
                }
            }
        }
        let mut corr = Vec::new();
        for i in 1..=J {
            for j in i + 1..=J {
                let reached: Vec<&Vec<f64>> = trials.iter().filter(|v| v.len() >= j).take(N).collect();
                let inc = |v: &Vec<f64>, m: usize| v[m - 1] - if m == 1 { 0.0 } else { v[m - 2] };
                let xs: Vec<f64> = reached.iter().map(|v| inc(v, i)).collect();
                let ys: Vec<f64> = reached.iter().map(|v| inc(v, j)).collect();
                match increment_independence(&xs, &ys) {
                    Ok(r) => {
                        pass &= r.pass;
                        corr.push(json!({ "i": i, "j": j, "z": r.statistic, "pass": r.pass }));
                    }
                    Err(e) => {
                        pass = false;
                        corr.push(json!({ "i": i, "j": j, "error": e.to_string() }));
                    }
                }
            }
        }
        per_theta.push(json!({ "theta": theta, "ks": ks, "correlation": corr }));
    }
    result(5, "exponential record increments", pass, json!({ "rows": per_theta }))
}

fn geometric_closed_form(p: &BigRational, ys: &[i64]) -> BigRational {
    let q = BigRational::one() - p;
    let n = ys.len();
    let last = *ys.last().expect("non-empty tuple");
    Pow::pow(&(p / &q), (n - 1) as u32) * Pow::pow(&q, (last - 1) as u32) * p
}

fn increasing_tuples(n: usize, max: i64) -> Vec<Vec<i64>> {
    fn rec(start: i64, left: usize, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=max {
            cur.push(v);
            rec(v + 1, left - 1, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, max, &mut Vec::new(), &mut out);
    out
}

/// Geometric record law in rationals and chi-square tests of the record increments.
pub fn geometric_records(seed: u64) -> CheckResult {
    const N: usize = 100_000;
    const LEVELS: usize = 4;
    let mut pass = true;
    let mut rows = Vec::new();
    for (num, den) in [(1i64, 4i64), (1, 2), (3, 4)] {
        let law = ExactDiscreteLaw::geometric(num, den);
        let p = BigRational::new(num.into(), den.into());
        let pf = num as f64 / den as f64;
        let d = DistributionSpec::geometric(pf).expect("valid parameters");
        let (mut tuples, mut exact_mismatch, mut float_err) = (0u64, 0u64, 0.0f64);
        for n in 1..=4 {
            for ys in increasing_tuples(n, 12) {
                let exact = discrete_record_joint_pmf_exact(&law, &ys).expect("non-empty tuple");
                let closed = geometric_closed_form(&p, &ys);
                tuples += 1;
                if exact != closed {
                    exact_mismatch += 1;
                }
                let yf: Vec<f64> = ys.iter().map(|&y| y as f64).collect();
                let float = discrete_record_joint_pmf(&d, &yf).expect("valid tuple").value;
                let reference = num::ToPrimitive::to_f64(&closed).unwrap_or(f64::NAN);
                float_err = float_err.max(((float - reference) / reference).abs());
            }
        }
        let exact_ok = exact_mismatch == 0 && float_err <= 1e-12;
        pass &= exact_ok;
        let trials = gather_records(&d, sub_seed(seed, &format!("geometric-{num}/{den}")), LEVELS, N);
        let probs: Vec<f64> = (1..=200).map(|k| d.pdf(k as f64)).take_while(|&m| m > 1e-300).collect();
        let mut chi = Vec::new();
        for j in 1..=LEVELS {
            let inc = increments(&trials, j, 0.0, N);
            let mut observed = vec![0u64; probs.len()];
            for x in &inc {
                let k = x.round() as usize;
                if (1..=probs.len()).contains(&k) {
                    observed[k - 1] += 1;
                }
            }
            match gof_chi_square_at(&observed, &probs, inc.len() as u64, 5.0, family_alpha(3 * LEVELS)) {
                Ok(r) => {
                    pass &= r.pass;
                    chi.push(json!({ "j": j, "chi_square": gof_json(&r) }));
                }
                Err(e) => {
                    pass = false;
                    chi.push(json!({ "j": j, "error": e.to_string() }));
                }
            }
        }
        rows.push(json!({
            "p": format!("{num}/{den}"), "tuples": tuples, "exact_mismatches": exact_mismatch,
            "float_rel_error": float_err, "increments": chi,
        }));
    }
    result(6, "geometric records", pass, json!({ "rows": rows }))
}

fn compositions(max_sum: u64, n: usize) -> Vec<Vec<u64>> {
    fn rec(left: u64, slots: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slots == 0 {
            out.push(cur.clone());
            return;
        }
        for k in 1..=left - (slots as u64 - 1) {
            cur.push(k);
            rec(left - k, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if max_sum >= n as u64 {
        rec(max_sum, n, &mut Vec::new(), &mut out);
    }
    out
}

fn gamma_lemma_rows() -> Vec<(Vec<u64>, f64, f64, f64, bool)> {
    let dists = [unif(), exp(1.0)];
    let mut rows = Vec::new();
    for n in 1..=3 {
        for ks in compositions(8, n) {
            let exact =
                num::ToPrimitive::to_f64(&gamma_integral_exact(&ks).expect("valid exponents")).unwrap_or(f64::NAN);
            let mut quad = [0.0; 2];
            let mut converged = true;
            for (slot, d) in quad.iter_mut().zip(&dists) {
                let cfg = QuadratureConfig::new(d.clone(), n).tolerance(1e-10);
                match simplex_quadrature(&cfg, &SimplexIntegrand::GammaKernel(ks.clone())) {
                    Ok(r) => {
                        *slot = r.value;
                        converged &= r.converged;
                    }
                    Err(_) => {
                        *slot = f64::NAN;
                        converged = false;
                    }
                }
            }
            rows.push((ks, exact, quad[0], quad[1], converged));
        }
    }
    rows
}

/// The gamma integral is distribution-free: quadrature on two laws against the rational value.
pub fn gamma_lemma() -> CheckResult {
    let rows = gamma_lemma_rows();
    let mut worst = 0.0f64;
    let mut pass = true;
    for (_, exact, u, e, converged) in &rows {
        let err = (u - exact).abs().max((e - exact).abs());
        worst = worst.max(err);
        pass &= *converged && err <= 1e-6;
    }
    result(7, "gamma integral lemma", pass, json!({ "tuples": rows.len(), "max_abs_error": worst, "tolerance": 1e-6 }))
}

type HazardCase = (&'static str, DistributionSpec, Option<f64>, f64);

fn hazard_cases() -> Vec<HazardCase> {
    vec![
        ("uniform", unif(), None, 0.5),
        ("uniform", unif(), None, 0.9),
        ("uniform", unif(), Some(0.2), 0.7),
        ("uniform", unif(), Some(0.5), 0.95),
        ("exponential", exp(1.0), None, 1.0),
        ("exponential", exp(1.0), None, 3.0),
        ("exponential", exp(1.0), Some(0.5), 2.0),
        ("exponential", exp(1.0), Some(1.0), 4.0),
    ]
}

/// `(dist, n, z, y, law, quadrature, converged)`.
type HazardRow = (&'static str, usize, Option<f64>, f64, f64, f64, bool);

fn hazard_rows() -> Vec<HazardRow> {
    let mut rows = Vec::new();
    for (name, d, z, y) in hazard_cases() {
        for n in 2..=4 {
            let law = hazard_simplex_integral(&d, n, z, y).unwrap_or(f64::NAN);
            let cfg = QuadratureConfig::new(d.clone(), n - 1).bounds(z, Some(y)).tolerance(1e-10);
            let (quad, converged) = match simplex_quadrature(&cfg, &SimplexIntegrand::HazardProduct) {
                Ok(r) => (r.value, r.converged),
                Err(_) => (f64::NAN, false),
            };
            rows.push((name, n, z, y, law, quad, converged));
        }
    }
    rows
}

/// Hazard-product integrals over the ordered simplex against the cumulative-hazard closed form.
pub fn hazard_integrals() -> CheckResult {
    let rows = hazard_rows();
    let mut worst = 0.0f64;
    let mut pass = true;
    for (.., law, quad, converged) in &rows {
        let err = (law - quad).abs();
        worst = worst.max(err);
        pass &= *converged && err <= 1e-6;
    }
    result(
        8,
        "hazard simplex integrals",
        pass,
        json!({ "cases": rows.len(), "max_abs_error": worst, "tolerance": 1e-6 }),
    )
}

const NO_FURTHER_HORIZON: usize = 200;

/// Probability of no further record on uniform {1..m}: law, simulation and enumeration.
pub fn no_further_record(seed: u64) -> CheckResult {
    const TRIALS: u64 = 100_000;
    let mut pass = true;
    let mut rows = Vec::new();
    for m in 2..=10usize {
        let d = DistributionSpec::discrete_uniform(m).expect("valid parameters");
        let law = prob_no_further_record(&d).value;
        let cfg = McConfig::new(TRIALS, NO_FURTHER_HORIZON as u64, sub_seed(seed, &format!("nofurther-{m}")));
        let (mc_ok, mc_detail) = match estimate_no_further_record(&d, &cfg) {
            Ok(r) => {
                let ok = r.within_binomial(law, STDERR_BAND) && r.truncation_mass < 1e-8;
                (ok, json!({ "estimate": r.estimate, "stderr": r.stderr, "truncation": r.truncation_mass }))
            }
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        let (dp_ok, dp_detail) = match exact_record_query(&EnumerationConfig::new(
            d.clone(),
            NO_FURTHER_HORIZON,
            EnumerationTarget::NoFurtherRecord,
        )) {
            Ok(r) => {
                let ok = (r.probability - law).abs() <= r.truncation_mass + 1e-12;
                (ok, json!({ "probability": r.probability, "truncation": r.truncation_mass }))
            }
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        pass &= mc_ok && dp_ok;
        rows.push(
            json!({ "m": m, "law": law, "mc": mc_detail, "mc_pass": mc_ok, "oracle": dp_detail, "oracle_pass": dp_ok }),
        );
    }
    result(9, "no further record", pass, json!({ "rows": rows }))
}

/// Joint cdf of running maxima at 20 random threshold vectors.
pub fn joint_maxima(seed: u64) -> CheckResult {
    const TRIALS: u64 = 1_000_000;
    const VECTORS: usize = 20;
    let d = unif();
    let mut rng = trial_rng(sub_seed(seed, "maxima-thresholds"), 0);
    let thresholds: Vec<[f64; 4]> = (0..VECTORS)
        .map(|_| [open_unit(&mut rng), open_unit(&mut rng), open_unit(&mut rng), open_unit(&mut rng)])
        .collect();
    let cfg = McConfig::new(TRIALS, 4, sub_seed(seed, "maxima"));
    let hits_per_trial = map_trials(&d, RecordKind::StrongUpper, &cfg, 0..TRIALS, |o| {
        let mut maxima = [f64::NEG_INFINITY; 4];
        for e in &o.records.events {
            for m in maxima.iter_mut().skip(e.time_index as usize - 1) {
                *m = e.value;
            }
        }
        let mut bits = 0u32;
        for (i, y) in thresholds.iter().enumerate() {
            if maxima.iter().zip(y).all(|(m, y)| m <= y) {
                bits |= 1 << i;
            }
        }
        bits
    });
    let mut hits = [0u64; VECTORS];
    for bits in hits_per_trial {
        for (i, h) in hits.iter_mut().enumerate() {
            *h += ((bits >> i) & 1) as u64;
        }
    }
    let mut pass = true;
    let mut rows = Vec::new();
    for (y, &h) in thresholds.iter().zip(&hits) {
        let law = joint_max_cdf(&d, y).expect("non-empty thresholds").value;
        let mc = McReport::from_counts(h, TRIALS, cfg.seed);
        let ok = mc.within_binomial(law, STDERR_BAND);
        pass &= ok;
        rows.push(json!({ "y": y, "law": law, "mc": mc_json(&mc), "pass": ok }));
    }
    result(10, "joint cdf of running maxima", pass, json!({ "rows": rows }))
}

fn random_sequence(seed: u64, index: u64) -> Vec<f64> {
    let mut rng = trial_rng(seed, index);
    let len = 1 + (open_unit(&mut rng) * 40.0) as usize;
    let ties = index.is_multiple_of(2);
    (0..len)
        .map(|_| {
            let u = open_unit(&mut rng);
            if ties {
                (u * 10.0).floor()
            } else {
                u * 20.0 - 10.0
            }
        })
        .collect()
}

/// Product order in one dimension, invariances of extraction and the poset transition law.
pub fn poset_sanity(seed: u64) -> CheckResult {
    const SEQUENCES: u64 = 10_000;
    let seq_seed = sub_seed(seed, "poset-sequences");
    let (mut product_mismatch, mut scaling_mismatch, mut duality_mismatch) = (0u64, 0u64, 0u64);
    for i in 0..SEQUENCES {
        let xs = random_sequence(seq_seed, i);
        for kind in RecordKind::ALL {
            let real = extract_all(xs.iter().copied(), kind, RealLine).expect("finite values");
            let product = extract_all(xs.iter().map(|&x| vec![x]), kind, ProductOrder::new(1)).expect("finite values");
            let same = real.events.len() == product.events.len()
                && real
                    .events
                    .iter()
                    .zip(&product.events)
                    .all(|(a, b)| a.ordinal == b.ordinal && a.time_index == b.time_index && b.value == [a.value]);
            product_mismatch += !same as u64;
            let times: Vec<u64> = real.times().collect();
            for map in [|x: f64| 3.0 * x + 1.0, |x: f64| (x / 4.0).exp()] {
                let scaled = extract_all(xs.iter().map(|&x| map(x)), kind, RealLine).expect("finite values");
                scaling_mismatch += (scaled.times().collect::<Vec<_>>() != times) as u64;
            }
            let dual = extract_all(xs.iter().map(|&x| -x), kind.dual(), RealLine).expect("finite values");
            let dual_ok =
                dual.times().collect::<Vec<_>>() == times && dual.values().zip(real.values()).all(|(a, b)| *a == -*b);
            duality_mismatch += !dual_ok as u64;
        }
    }
    let u = unif();
    let mut transitions = Vec::new();
    let mut transitions_ok = true;
    for (k, j) in [(1u64, 2u64), (1, 3), (2, 3), (2, 4), (3, 4), (3, 6)] {
        let law = record_time_transition_pmf(k, j).value;
        let cfg = McConfig::new(200_000, j, sub_seed(seed, &format!("poset-{k}-{j}")));
        match estimate_poset_transition(std::slice::from_ref(&u), k, j, &cfg) {
            Ok(r) => {
                let ok = r.within_binomial(law, STDERR_BAND);
                transitions_ok &= ok;
                transitions.push(json!({ "k": k, "j": j, "law": law, "mc": mc_json(&r), "pass": ok }));
            }
            Err(e) => {
                transitions_ok = false;
                transitions.push(json!({ "k": k, "j": j, "error": e.to_string() }));
            }
        }
    }
    let pass = product_mismatch == 0 && scaling_mismatch == 0 && duality_mismatch == 0 && transitions_ok;
    result(
        11,
        "poset sanity",
        pass,
        json!({
            "sequences": SEQUENCES,
            "product_order_mismatches": product_mismatch,
            "rescaling_mismatches": scaling_mismatch,
            "duality_mismatches": duality_mismatch,
            "transitions": transitions,
        }),
    )
}

/// Names of the CSV tables.
pub const TABLES: [&str; 5] = ["gaps", "pairs", "gamma", "hazard-integrals", "no-further-record"];

/// Renders one deterministic table as CSV.
pub fn table_csv(name: &str) -> Option<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fmt = |x: f64| format!("{x:.12e}");
    match name {
        "gaps" => {
            w.write_record(["k", "law", "oracle_strong", "oracle_lower", "oracle_upper", "truncation"]).ok()?;
            let grid = DistributionSpec::discrete_uniform(64).ok()?;
            for k in 1..=10u64 {
                let target = EnumerationTarget::InterRecordPmf { gaps: vec![k] };
                let q = |ties| {
                    exact_record_query(
                        &EnumerationConfig::new(grid.clone(), k as usize + 1, target.clone()).with_ties(ties),
                    )
                };
                let (s, lo, hi) = (
                    q(TieHandling::StrongRecords).ok()?,
                    q(TieHandling::ContinuousLower).ok()?,
                    q(TieHandling::ContinuousUpper).ok()?,
                );
                let law = interrecord_joint_pmf(&[k]).ok()?.value;
                let trunc = s.truncation_mass.max(lo.truncation_mass).max(hi.truncation_mass);
                w.write_record([
                    k.to_string(),
                    fmt(law),
                    fmt(s.probability),
                    fmt(lo.probability),
                    fmt(hi.probability),
                    fmt(trunc),
                ])
                .ok()?;
            }
        }
        "pairs" => {
            w.write_record(["k", "l", "law"]).ok()?;
            for k in 1..=5u64 {
                for l in 1..=5u64 {
                    let law = interrecord_joint_pmf(&[k, l]).ok()?.value;
                    w.write_record([k.to_string(), l.to_string(), fmt(law)]).ok()?;
                }
            }
        }
        "gamma" => {
            w.write_record(["exponents", "exact", "uniform_quadrature", "exponential_quadrature"]).ok()?;
            for (ks, exact, u, e, _) in gamma_lemma_rows() {
                let label = ks.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
                w.write_record([label, fmt(exact), fmt(u), fmt(e)]).ok()?;
            }
        }
        "hazard-integrals" => {
            w.write_record(["dist", "n", "z", "y", "law", "quadrature"]).ok()?;
            for (name, n, z, y, law, quad, _) in hazard_rows() {
                let z = z.map_or_else(|| "lep".to_string(), |z| z.to_string());
                w.write_record([name.to_string(), n.to_string(), z, y.to_string(), fmt(law), fmt(quad)]).ok()?;
            }
        }
        "no-further-record" => {
            w.write_record(["m", "law", "oracle", "truncation"]).ok()?;
            for m in 2..=10usize {
                let d = DistributionSpec::discrete_uniform(m).ok()?;
                let law = prob_no_further_record(&d).value;
                let r = exact_record_query(&EnumerationConfig::new(
                    d,
                    NO_FURTHER_HORIZON,
                    EnumerationTarget::NoFurtherRecord,
                ))
                .ok()?;
                w.write_record([m.to_string(), fmt(law), fmt(r.probability), fmt(r.truncation_mass)]).ok()?;
            }
        }
        _ => return None,
    }
    String::from_utf8(w.into_inner().ok()?).ok()
}
