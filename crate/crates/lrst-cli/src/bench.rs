//! Runtime benchmark of a single test evaluation across trial sizes and
//! dose-arm counts.

use std::time::Instant;

use lrst_core::{multi_arm_lrst, LrstOptions};

use crate::simulator::{gen_trial, SimScenario};

#[derive(Debug, Clone)]
pub struct BenchCell {
    pub n_control: usize,
    pub dose_arms: usize,
    pub n_total: usize,
    /// Wall times of the individual runs, seconds.
    pub runs_s: Vec<f64>,
    pub median_s: f64,
    pub min_s: f64,
    pub max_s: f64,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Time `multi_arm_lrst` on one generated null trial per (n_control,
/// dose-arm) cell. Each cell runs `runs` times (at least 5) and reports the
/// median.
pub fn runtime_bench(
    grid: &[(usize, usize)],
    runs: usize,
    mc_draws: usize,
    seed: u64,
) -> Vec<BenchCell> {
    let runs = runs.max(5);
    grid.iter()
        .map(|&(n_control, dose_arms)| {
            let mut sc = SimScenario::bapi_default(dose_arms, n_control);
            sc.seed = seed;
            let ds = gen_trial(&sc, 0);
            let mut times: Vec<f64> = (0..runs)
                .map(|r| {
                    let opts = LrstOptions {
                        mc_draws,
                        seed: seed.wrapping_add(r as u64),
                        force_monte_carlo: false,
                    };
                    let start = Instant::now();
                    let res = multi_arm_lrst(&ds, &opts).expect("generated trial is testable");
                    let elapsed = start.elapsed().as_secs_f64();
                    assert!(res.p_value.is_finite());
                    elapsed
                })
                .collect();
            times.sort_by(f64::total_cmp);
            BenchCell {
                n_control,
                dose_arms,
                n_total: sc.n_total(),
                median_s: median(&times),
                min_s: times[0],
                max_s: times[times.len() - 1],
                runs_s: times,
            }
        })
        .collect()
}

pub fn bench_to_csv(cells: &[BenchCell]) -> String {
    let mut out = String::from("n_control,dose_arms,n_total,runs,median_s,min_s,max_s\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.6},{:.6}\n",
            c.n_control,
            c.dose_arms,
            c.n_total,
            c.runs_s.len(),
            c.median_s,
            c.min_s,
            c.max_s
        ));
    }
    out
}

/// The grid of the reference runtime table: n_control ∈ {200..500} by
/// total arms 3..7 (2..6 dose arms).
pub fn default_grid() -> Vec<(usize, usize)> {
    let mut grid = Vec::new();
    for n_control in [200, 300, 400, 500] {
        for dose_arms in 2..=6 {
            grid.push((n_control, dose_arms));
        }
    }
    grid
}
