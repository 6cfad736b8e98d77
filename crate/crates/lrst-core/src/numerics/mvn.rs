//! Monte-Carlo tail probability of the maximum coordinate of a centred
//! multivariate normal vector.

use alloc::vec;

use libm::sqrt;

use super::linalg::{CorrelationMatrix, Matrix};
use super::rng::CounterRng;

/// Estimate P(max_i Z_i > v) for Z ~ N(0, C) together with the binomial
/// standard error √(p̂(1−p̂)/draws).
///
/// Draw `i` consumes its own counter substream of `seed`, so the estimate is
/// bit-reproducible and independent of evaluation order. `corr` must be
/// positive definite (run [`CorrelationMatrix::repair`] beforehand if not).
pub fn mvn_max_tail(corr: &CorrelationMatrix, v: f64, draws: usize, seed: u64) -> (f64, f64) {
    assert!(draws > 0, "need at least one draw");
    let factor = corr
        .cholesky()
        .expect("correlation matrix must be positive definite (repair first)");
    max_tail_with_factor(&factor, v, draws, seed)
}

pub(crate) fn max_tail_with_factor(
    factor: &Matrix,
    v: f64,
    draws: usize,
    seed: u64,
) -> (f64, f64) {
    let dim = factor.rows();
    let mut g = vec![0.0; dim];
    let mut exceed = 0usize;
    for i in 0..draws {
        let mut rng = CounterRng::substream(seed, i as u64);
        rng.fill_normals(&mut g);
        // z = L·g, track the running max; it can only grow with the row index
        let mut hit = false;
        for row in 0..dim {
            let mut z = 0.0;
            for k in 0..=row {
                z += factor[(row, k)] * g[k];
            }
            if z > v {
                hit = true;
                break;
            }
        }
        if hit {
            exceed += 1;
        }
    }
    let p = exceed as f64 / draws as f64;
    (p, sqrt(p * (1.0 - p) / draws as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bvn::bvn_cdf;
    use crate::numerics::normal::norm_sf;

    fn corr2(rho: f64) -> CorrelationMatrix {
        CorrelationMatrix::from_fn(2, |_, _| rho)
    }

    #[test]
    fn univariate_tail_matches_normal() {
        let c = CorrelationMatrix::from_fn(1, |_, _| 0.0);
        let (p, se) = mvn_max_tail(&c, 1.645, 1_000_000, 11);
        let want = norm_sf(1.645);
        assert!((p - want).abs() < 3.0 * se, "p={p} want={want} se={se}");
    }

    #[test]
    fn independent_orthant() {
        let (p, se) = mvn_max_tail(&corr2(0.0), 0.0, 500_000, 5);
        assert!((p - 0.75).abs() < 3.0 * se, "p={p} se={se}");
    }

    #[test]
    fn matches_bivariate_cdf() {
        for &(rho, v) in &[(0.4, 1.0), (-0.3, 0.5), (0.8, 1.645)] {
            let (p, se) = mvn_max_tail(&corr2(rho), v, 400_000, 17);
            let want = 1.0 - bvn_cdf(v, v, rho);
            assert!(
                (p - want).abs() < 3.0 * se.max(1e-6),
                "rho={rho} v={v}: {p} vs {want}"
            );
        }
    }

    #[test]
    fn seeded_runs_are_bit_identical() {
        let a = mvn_max_tail(&corr2(0.5), 1.0, 50_000, 123);
        let b = mvn_max_tail(&corr2(0.5), 1.0, 50_000, 123);
        assert_eq!(a, b);
    }

    #[test]
    fn monotone_decreasing_in_threshold_under_common_draws() {
        let mut last = f64::INFINITY;
        for &v in &[0.0, 0.5, 1.0, 1.5, 2.0] {
            let (p, _) = mvn_max_tail(&corr2(0.3), v, 200_000, 77);
            assert!(p <= last, "tail should shrink as v grows");
            last = p;
        }
    }
}
