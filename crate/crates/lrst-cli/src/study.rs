//! Replicated simulation studies: Type-I error, power versus the
//! Bonferroni-corrected univariate comparator, and dose-selection
//! proportions.

use std::time::Instant;

use lrst_core::{bonferroni_univariate, multi_arm_lrst, LrstOptions, TestError};
use rayon::prelude::*;
use serde::Serialize;

use crate::simulator::{gen_trial, SimScenario};

#[derive(Debug, Clone, Copy)]
pub struct StudyOptions {
    pub replications: usize,
    pub alpha: f64,
    /// Monte-Carlo p-value draws (used on the A ≥ 3 path).
    pub mc_draws: usize,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            replications: 1000,
            alpha: 0.05,
            mc_draws: 100_000,
        }
    }
}

/// Aggregate of one grid point's replications. Wall time is excluded from
/// serialized payloads so seeded outputs stay byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub multipliers: Vec<f64>,
    pub n_control: usize,
    pub n_doses: Vec<usize>,
    pub n_total: usize,
    pub replications: usize,
    pub alpha: f64,
    pub rejections: usize,
    pub rejection_rate: f64,
    /// 95% Wilson score interval for the rejection rate.
    pub rate_ci_low: f64,
    pub rate_ci_high: f64,
    /// Bonferroni-corrected univariate comparator.
    pub comparator_rejections: usize,
    pub comparator_rate: f64,
    /// Selected-dose counts among rejected replications.
    pub selection_counts: Vec<usize>,
    /// `selection_counts / rejections`; zeros when nothing was rejected.
    pub selection_proportions: Vec<f64>,
    #[serde(skip)]
    pub wall_time_s: f64,
}

const Z_95: f64 = 1.959963984540054;

fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z_95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Run one scenario for `replications` seeded replications. Replications
/// execute in parallel; per-replication substreams make the aggregate
/// independent of scheduling.
pub fn run_study(sc: &SimScenario, opts: &StudyOptions) -> Result<StudyReport, TestError> {
    let start = Instant::now();
    let a_len = sc.dose_arms();

    let outcomes: Result<Vec<(bool, usize, bool)>, TestError> = (0..opts.replications as u64)
        .into_par_iter()
        .map(|rep| {
            let ds = gen_trial(sc, rep);
            let test_opts = LrstOptions {
                mc_draws: opts.mc_draws,
                seed: sc.mc_seed(rep),
                force_monte_carlo: false,
            };
            let res = multi_arm_lrst(&ds, &test_opts)?;
            let comparator = bonferroni_univariate(&ds, opts.alpha)?;
            Ok((
                res.p_value < opts.alpha,
                res.selected_dose,
                comparator.rejected,
            ))
        })
        .collect();
    let outcomes = outcomes?;

    let mut rejections = 0;
    let mut comparator_rejections = 0;
    let mut selection_counts = vec![0usize; a_len];
    for (rejected, selected, comp) in outcomes {
        if rejected {
            rejections += 1;
            selection_counts[selected] += 1;
        }
        if comp {
            comparator_rejections += 1;
        }
    }

    let n = opts.replications;
    let (ci_low, ci_high) = wilson_interval(rejections, n);
    let selection_proportions = selection_counts
        .iter()
        .map(|&c| {
            if rejections == 0 {
                0.0
            } else {
                c as f64 / rejections as f64
            }
        })
        .collect();

    Ok(StudyReport {
        multipliers: sc.multipliers.clone(),
        n_control: sc.n_control,
        n_doses: sc.n_doses.clone(),
        n_total: sc.n_total(),
        replications: n,
        alpha: opts.alpha,
        rejections,
        rejection_rate: rejections as f64 / n as f64,
        rate_ci_low: ci_low,
        rate_ci_high: ci_high,
        comparator_rejections,
        comparator_rate: comparator_rejections as f64 / n as f64,
        selection_counts,
        selection_proportions,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Null study: every multiplier must be zero.
pub fn type1_study(sc: &SimScenario, opts: &StudyOptions) -> Result<StudyReport, TestError> {
    assert!(
        sc.multipliers.iter().all(|&m| m == 0.0),
        "type-I study requires all-zero effect multipliers"
    );
    run_study(sc, opts)
}

/// Power study over a grid of multiplier vectors. Every grid point reuses
/// the scenario seed, so error draws are common random numbers across
/// points and power comparisons are paired.
pub fn power_study(
    sc: &SimScenario,
    grid: &[Vec<f64>],
    opts: &StudyOptions,
) -> Result<Vec<StudyReport>, TestError> {
    grid.iter()
        .map(|multipliers| run_study(&sc.with_multipliers(multipliers.clone()), opts))
        .collect()
}

/// Deterministic CSV payload, one row per grid point.
pub fn reports_to_csv(reports: &[StudyReport]) -> String {
    let a_len = reports.first().map_or(0, |r| r.n_doses.len());
    let mut out = String::new();
    for a in 0..a_len {
        out.push_str(&format!("multiplier_{},", a + 1));
    }
    out.push_str(
        "n_control,n_total,replications,alpha,rejection_rate,rate_ci_low,rate_ci_high,comparator_rate",
    );
    for a in 0..a_len {
        out.push_str(&format!(",selection_prop_{}", a + 1));
    }
    out.push('\n');
    for r in reports {
        for m in &r.multipliers {
            out.push_str(&format!("{m},"));
        }
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}",
            r.n_control,
            r.n_total,
            r.replications,
            r.alpha,
            r.rejection_rate,
            r.rate_ci_low,
            r.rate_ci_high,
            r.comparator_rate
        ));
        for p in &r.selection_proportions {
            out.push_str(&format!(",{p}"));
        }
        out.push('\n');
    }
    out
}

/// Long-format companion payload for plotting power curves:
/// `point,series,value` rows.
pub fn reports_to_long_csv(reports: &[StudyReport]) -> String {
    let mut out = String::from("point,series,value\n");
    for (i, r) in reports.iter().enumerate() {
        out.push_str(&format!("{i},multi_arm_power,{}\n", r.rejection_rate));
        out.push_str(&format!("{i},bonferroni_power,{}\n", r.comparator_rate));
        for (a, p) in r.selection_proportions.iter().enumerate() {
            out.push_str(&format!("{i},selection_prop_{},{p}\n", a + 1));
        }
    }
    out
}
