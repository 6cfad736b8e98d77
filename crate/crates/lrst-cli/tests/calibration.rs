//! Distributional calibration of the full test under the null: p-values
//! should be uniform, and power should not decrease along a multiplier
//! grid.

use lrst_cli::simulator::{gen_trial, SimScenario};
use lrst_cli::study::{power_study, StudyOptions};
use lrst_core::{multi_arm_lrst, LrstOptions};

/// Asymptotic Kolmogorov-Smirnov p-value with the Stephens correction.
fn ks_pvalue(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        let f = cdf(v);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for j in 1..101 {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        p += sign * (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// Under the null with two dose arms the closed-form max-of-two p-value is
/// uniform on [0, 1] across replications.
#[test]
fn null_two_dose_pvalues_are_uniform() {
    let mut sc = SimScenario::bapi_default(2, 100);
    sc.seed = 404;
    let mut ps: Vec<f64> = (0..400u64)
        .map(|rep| {
            let ds = gen_trial(&sc, rep);
            multi_arm_lrst(&ds, &LrstOptions::default())
                .unwrap()
                .p_value
        })
        .collect();
    ps.sort_by(f64::total_cmp);
    let p = ks_pvalue(&ps, |x| x.clamp(0.0, 1.0));
    assert!(p > 0.01, "KS p {p}: null p-values are not uniform");
}

/// Power is monotone non-decreasing in the shared multiplier, within twice
/// the Monte-Carlo standard error at neighbouring grid points.
#[test]
fn power_is_monotone_in_the_multiplier() {
    let mut sc = SimScenario::bapi_default(2, 90);
    sc.n_doses = vec![60, 60];
    sc.seed = 17;
    let grid: Vec<Vec<f64>> = [0.0, 0.5, 1.0, 1.5, 2.0].iter().map(|&a| vec![a, a]).collect();
    let reports = power_study(
        &sc,
        &grid,
        &StudyOptions {
            replications: 300,
            alpha: 0.05,
            mc_draws: 20_000,
        },
    )
    .unwrap();
    for w in reports.windows(2) {
        let se = (w[0].rejection_rate * (1.0 - w[0].rejection_rate)
            / w[0].replications as f64)
            .sqrt();
        assert!(
            w[1].rejection_rate >= w[0].rejection_rate - 2.0 * se,
            "power dropped along the grid: {} -> {}",
            w[0].rejection_rate,
            w[1].rejection_rate
        );
    }
}
