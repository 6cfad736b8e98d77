//! Oracle tests: the fast sorting-based estimators must reproduce literal
//! nested-loop transcriptions of their defining formulas, the rank–θ
//! identity must hold exactly, and the standardized component must be
//! calibrated against null simulations.

use lrst_core::numerics::rng::CounterRng;
use lrst_core::{
    c_cross_hat, c_hat, component_zscore, d_hat, midranks, theta_hat, Arm, CovArray, TrialDataset,
};

fn ind_less(a: f64, b: f64) -> f64 {
    // tie-split indicator 1(a < b)
    if a < b {
        1.0
    } else if a == b {
        0.5
    } else {
        0.0
    }
}

fn build(arms: Vec<(String, Vec<f64>)>, t: usize, k: usize) -> TrialDataset {
    let mut it = arms.into_iter();
    let (cl, cv) = it.next().unwrap();
    let control = Arm::new(cl, t, k, cv).unwrap();
    let doses = it.map(|(l, v)| Arm::new(l, t, k, v).unwrap()).collect();
    TrialDataset::new(control, doses, (0..k).map(|i| format!("y{i}")).collect(), t).unwrap()
}

/// Uniform panel; when `tie_grid` is set, values snap to a coarse lattice so
/// ties occur with high probability.
fn random_panel(rng: &mut CounterRng, n: usize, t: usize, k: usize, tie_grid: bool) -> Vec<f64> {
    (0..n * t * k)
        .map(|_| {
            let u = rng.next_f64();
            if tie_grid {
                (u * 8.0).floor() / 8.0
            } else {
                u
            }
        })
        .collect()
}

fn random_pair(rng: &mut CounterRng, tie_grid: bool) -> (TrialDataset, usize, usize) {
    let t = 1 + (rng.next_u64() % 3) as usize;
    let k = 1 + (rng.next_u64() % 2) as usize;
    let n_x = 2 + (rng.next_u64() % 4) as usize;
    let n_y = 2 + (rng.next_u64() % 4) as usize;
    let ds = build(
        vec![
            ("c".into(), random_panel(rng, n_x, t, k, tie_grid)),
            ("d".into(), random_panel(rng, n_y, t, k, tie_grid)),
        ],
        t,
        k,
    );
    (ds, t, k)
}

fn theta_loop(ds: &TrialDataset, dose: usize, t: usize, k: usize) -> f64 {
    let x = ds.control();
    let y = ds.dose(dose);
    let mut s = 0.0;
    for i in 0..x.n_subjects() {
        for j in 0..y.n_subjects() {
            let (a, b) = (x.value(i, t, k), y.value(j, t, k));
            s += ind_less(a, b) - ind_less(b, a);
        }
    }
    s / (x.n_subjects() * y.n_subjects()) as f64
}

fn c_loop(ds: &TrialDataset, dose: usize, t1: usize, k1: usize, t2: usize, k2: usize) -> f64 {
    let x = ds.control();
    let y = ds.dose(dose);
    let (n_x, n_y) = (x.n_subjects(), y.n_subjects());
    let m1 = (1.0 - theta_loop(ds, dose, t1, k1)) / 2.0;
    let m2 = (1.0 - theta_loop(ds, dose, t2, k2)) / 2.0;
    let mut s = 0.0;
    for i in 0..n_x {
        let mut p1 = 0.0;
        let mut p2 = 0.0;
        for j in 0..n_y {
            p1 += ind_less(y.value(j, t1, k1), x.value(i, t1, k1));
            p2 += ind_less(y.value(j, t2, k2), x.value(i, t2, k2));
        }
        s += (p1 / n_y as f64 - m1) * (p2 / n_y as f64 - m2);
    }
    s / n_x as f64
}

fn d_loop(ds: &TrialDataset, dose: usize, t1: usize, k1: usize, t2: usize, k2: usize) -> f64 {
    let x = ds.control();
    let y = ds.dose(dose);
    let (n_x, n_y) = (x.n_subjects(), y.n_subjects());
    let m1 = (1.0 + theta_loop(ds, dose, t1, k1)) / 2.0;
    let m2 = (1.0 + theta_loop(ds, dose, t2, k2)) / 2.0;
    let mut s = 0.0;
    for j in 0..n_y {
        let mut p1 = 0.0;
        let mut p2 = 0.0;
        for i in 0..n_x {
            p1 += ind_less(x.value(i, t1, k1), y.value(j, t1, k1));
            p2 += ind_less(x.value(i, t2, k2), y.value(j, t2, k2));
        }
        s += (p1 / n_x as f64 - m1) * (p2 / n_x as f64 - m2);
    }
    s / n_y as f64
}

fn cross_loop(
    ds: &TrialDataset,
    di: usize,
    dj: usize,
    t1: usize,
    k1: usize,
    t2: usize,
    k2: usize,
) -> f64 {
    let x = ds.control();
    let yi = ds.dose(di);
    let yj = ds.dose(dj);
    let n_x = x.n_subjects();
    let m1 = (1.0 - theta_loop(ds, di, t1, k1)) / 2.0;
    let m2 = (1.0 - theta_loop(ds, dj, t2, k2)) / 2.0;
    let mut s = 0.0;
    for i in 0..n_x {
        let mut p1 = 0.0;
        for j in 0..yi.n_subjects() {
            p1 += ind_less(yi.value(j, t1, k1), x.value(i, t1, k1));
        }
        let mut p2 = 0.0;
        for l in 0..yj.n_subjects() {
            p2 += ind_less(yj.value(l, t2, k2), x.value(i, t2, k2));
        }
        s += (p1 / yi.n_subjects() as f64 - m1) * (p2 / yj.n_subjects() as f64 - m2);
    }
    s / n_x as f64
}

fn assert_cov_matches_loop(
    fast: &CovArray,
    loop_val: impl Fn(usize, usize, usize, usize) -> f64,
    t: usize,
    k: usize,
    tol: f64,
) {
    for t1 in 0..t {
        for k1 in 0..k {
            for t2 in 0..t {
                for k2 in 0..k {
                    let f = fast.get(t1, k1, t2, k2);
                    let o = loop_val(t1, k1, t2, k2);
                    assert!(
                        (f - o).abs() <= tol,
                        "({t1},{k1},{t2},{k2}): fast {f} vs loop {o}"
                    );
                }
            }
        }
    }
}

#[test]
fn within_estimators_match_nested_loops() {
    let mut rng = CounterRng::new(101);
    for rep in 0..50 {
        let tie_grid = rep % 2 == 0;
        let (ds, t, k) = random_pair(&mut rng, tie_grid);
        let theta = theta_hat(&ds, 0);
        for tt in 0..t {
            for kk in 0..k {
                let o = theta_loop(&ds, 0, tt, kk);
                assert!((theta.theta[(tt, kk)] - o).abs() < 1e-12);
            }
        }
        let c = c_hat(&ds, 0);
        assert_cov_matches_loop(&c, |a, b, cc, dd| c_loop(&ds, 0, a, b, cc, dd), t, k, 1e-12);
        let d = d_hat(&ds, 0);
        assert_cov_matches_loop(&d, |a, b, cc, dd| d_loop(&ds, 0, a, b, cc, dd), t, k, 1e-12);
    }
}

#[test]
fn cross_estimator_matches_nested_loops() {
    let mut rng = CounterRng::new(202);
    for rep in 0..50 {
        let tie_grid = rep % 2 == 1;
        let t = 1 + (rng.next_u64() % 3) as usize;
        let k = 1 + (rng.next_u64() % 2) as usize;
        let n_x = 2 + (rng.next_u64() % 4) as usize;
        let ds = build(
            vec![
                ("c".into(), random_panel(&mut rng, n_x, t, k, tie_grid)),
                ("d1".into(), random_panel(&mut rng, 3, t, k, tie_grid)),
                ("d2".into(), random_panel(&mut rng, 4, t, k, tie_grid)),
            ],
            t,
            k,
        );
        let cross = c_cross_hat(&ds, 0, 1);
        assert_cov_matches_loop(
            &cross,
            |a, b, cc, dd| cross_loop(&ds, 0, 1, a, b, cc, dd),
            t,
            k,
            1e-12,
        );
    }
}

/// Per (t, k): R̄_{y·tk} − R̄_{x·tk} = (N₁/2)·θ̂_tk, where θ̂ comes from
/// brute-force pair enumeration. Checked in a scaled form that is exact in
/// floating point (rank sums and win counts are multiples of ½).
#[test]
fn rank_theta_identity_holds_exactly() {
    let mut rng = CounterRng::new(303);
    for rep in 0..100 {
        let tie_grid = rep % 2 == 0;
        let (ds, t, k) = random_pair(&mut rng, tie_grid);
        let n_x = ds.control().n_subjects();
        let n_y = ds.dose(0).n_subjects();
        let n1 = (n_x + n_y) as f64;
        for tt in 0..t {
            for kk in 0..k {
                let mut pooled = ds.control().column(tt, kk);
                pooled.extend(ds.dose(0).column(tt, kk));
                let ranks = midranks(&pooled).unwrap();
                let sum_x: f64 = ranks[..n_x].iter().sum();
                let sum_y: f64 = ranks[n_x..].iter().sum();
                // scaled identity: n_x·Σ_y − n_y·Σ_x = (N₁/2)·(θ̂·n_x·n_y)
                let lhs = n_x as f64 * sum_y - n_y as f64 * sum_x;
                let win_sum = theta_loop(&ds, 0, tt, kk) * (n_x * n_y) as f64;
                let rhs = n1 / 2.0 * win_sum;
                assert_eq!(lhs, rhs, "rep {rep} cell ({tt},{kk})");

                // unscaled form within float tolerance
                let rdiff = sum_y / n_y as f64 - sum_x / n_x as f64;
                assert!((rdiff - n1 / 2.0 * theta_loop(&ds, 0, tt, kk)).abs() < 1e-12);
            }
        }
    }
}

/// Kolmogorov-Smirnov p-value (asymptotic, with the Stephens small-sample
/// correction).
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

/// Null calibration of the standardized component: its empirical variance
/// over replications must sit near 1, and its distribution must be
/// indistinguishable from N(0,1) by a KS test.
#[test]
fn null_component_is_standard_normal() {
    // variance band, n = 500 per arm
    let mut zs = Vec::with_capacity(2000);
    for rep in 0..2000u64 {
        let mut rng = CounterRng::substream(404, rep);
        let ds = build(
            vec![
                ("c".into(), random_panel(&mut rng, 500, 2, 1, false)),
                ("d".into(), random_panel(&mut rng, 500, 2, 1, false)),
            ],
            2,
            1,
        );
        zs.push(component_zscore(&ds, 0).unwrap());
    }
    let mean = zs.iter().sum::<f64>() / zs.len() as f64;
    let var = zs.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / (zs.len() - 1) as f64;
    assert!(
        (0.9..=1.1).contains(&var),
        "null component variance {var} outside [0.9, 1.1]"
    );

    // KS against N(0,1), n = 2000 per arm, 500 replications
    let mut zs = Vec::with_capacity(500);
    for rep in 0..500u64 {
        let mut rng = CounterRng::substream(505, rep);
        let ds = build(
            vec![
                ("c".into(), random_panel(&mut rng, 2000, 2, 1, false)),
                ("d".into(), random_panel(&mut rng, 2000, 2, 1, false)),
            ],
            2,
            1,
        );
        zs.push(component_zscore(&ds, 0).unwrap());
    }
    zs.sort_by(f64::total_cmp);
    let p = ks_pvalue(&zs, lrst_core::numerics::normal::norm_cdf);
    assert!(p > 0.01, "KS p-value {p} rejects standard-normal components");
}
