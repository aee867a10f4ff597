use proptest::prelude::*;
use records_core::laws::{
    discrete_record_pmf, record_joint_cdf_truncated, record_value_marginal_pdf, record_value_subvector_pdf,
};
use records_core::oracle::{
    exact_record_query, simplex_quadrature, EnumerationConfig, EnumerationTarget, QuadratureConfig, SimplexIntegrand,
};
use records_core::verify::run_check;
use records_core::DistributionSpec;
use statrs::distribution::{ContinuousCDF, Gamma};

#[test]
fn discrete_law_matches_enumeration() {
    for d in [
        DistributionSpec::discrete_uniform(6).unwrap(),
        DistributionSpec::finite(vec![-1.0, 0.5, 2.0, 7.0], vec![0.1, 0.4, 0.3, 0.2]).unwrap(),
        DistributionSpec::geometric(0.4).unwrap(),
    ] {
        let (points, _) = d.truncated_support(1e-12).unwrap();
        for n in 1..=3 {
            for &y in points.iter().take(8) {
                let law = discrete_record_pmf(&d, n, y).unwrap().value;
                let cfg = EnumerationConfig::new(d.clone(), 400, EnumerationTarget::RecordValuePmf { n, y });
                let r = exact_record_query(&cfg).unwrap();
                assert!(
                    (r.probability - law).abs() <= r.truncation_mass + 1e-10,
                    "{} n={n} y={y}: {r:?} vs {law}",
                    d.label()
                );
            }
        }
    }
}

#[test]
fn truncated_series_gives_gamma_marginal_cdf() {
    // with all earlier thresholds infinite the series is the cdf of X(n)
    let d = DistributionSpec::exponential(1.0).unwrap();
    for n in 1..=3usize {
        for y in [0.5, 1.5, 3.0] {
            let mut ys = vec![f64::INFINITY; n - 1];
            ys.push(y);
            let t = record_joint_cdf_truncated(&d, &ys, 3000).unwrap();
            let exact = Gamma::new(n as f64, 1.0).unwrap().cdf(y);
            assert!((t.law.value - exact).abs() <= t.truncation_mass + 1e-9, "n={n} y={y}: {t:?} vs {exact}");
        }
    }
}

#[test]
fn joint_density_integrates_to_marginal() {
    for d in [DistributionSpec::uniform(0.0, 1.0).unwrap(), DistributionSpec::exponential(2.0).unwrap()] {
        for y in [0.3, 0.8] {
            for depth in 1..=2 {
                let cfg = QuadratureConfig::new(d.clone(), depth).bounds(None, Some(y)).tolerance(1e-10);
                let q = simplex_quadrature(&cfg, &SimplexIntegrand::JointRecordDensity).unwrap();
                let marginal = record_value_marginal_pdf(&d, depth + 1, y).unwrap().value;
                assert!(q.converged && (q.value - marginal).abs() < 1e-7, "{} y={y}: {q:?} vs {marginal}", d.label());
            }
        }
    }
}

#[test]
fn suite_checks_do_not_depend_on_thread_count() {
    let many = run_check(9, 11);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run_check(9, 11));
    assert_eq!(serde_json::to_string(&many).unwrap(), serde_json::to_string(&one).unwrap());
}

proptest! {
    #[test]
    fn subvector_of_single_index_is_marginal(n in 1usize..6, x in 0.01f64..5.0) {
        let d = DistributionSpec::exponential(1.3).unwrap();
        let a = record_value_subvector_pdf(&d, &[n], &[x]).unwrap().value;
        let b = record_value_marginal_pdf(&d, n, x).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }
}
