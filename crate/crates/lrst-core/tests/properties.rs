//! Property tests for the structural invariants of the ranking and
//! estimation kernels.

use proptest::prelude::*;

use lrst_core::{
    harmonize_directions, midranks, pair_rank_profile, theta_hat, Arm, Direction, OutcomeSpec,
    TrialDataset,
};

fn finite_vec(min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e6..1e6f64, min_len..=max_len)
}

/// Values drawn from a small lattice so ties are frequent.
fn tied_vec(min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-8i32..8).prop_map(|v| v as f64 / 4.0), min_len..=max_len)
}

fn pair(control: Vec<f64>, dose: Vec<f64>) -> TrialDataset {
    TrialDataset::new(
        Arm::new("c".into(), 1, 1, control).unwrap(),
        vec![Arm::new("d".into(), 1, 1, dose).unwrap()],
        vec!["y".into()],
        1,
    )
    .unwrap()
}

proptest! {
    #[test]
    fn midranks_sum_to_triangular_number(v in finite_vec(1, 60)) {
        let ranks = midranks(&v).unwrap();
        let n = v.len() as f64;
        let sum: f64 = ranks.iter().sum();
        prop_assert!((sum - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn midranks_sum_to_triangular_number_under_ties(v in tied_vec(1, 60)) {
        let ranks = midranks(&v).unwrap();
        let n = v.len() as f64;
        let sum: f64 = ranks.iter().sum();
        prop_assert!((sum - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }

    /// Pooled control and dose rank sums partition M(M+1)/2 at every cell.
    #[test]
    fn pooled_rank_sums_partition(x in tied_vec(2, 30), y in tied_vec(2, 30)) {
        let mut pooled = x.clone();
        pooled.extend_from_slice(&y);
        let ranks = midranks(&pooled).unwrap();
        let m = pooled.len() as f64;
        let sx: f64 = ranks[..x.len()].iter().sum();
        let sy: f64 = ranks[x.len()..].iter().sum();
        prop_assert!((sx + sy - m * (m + 1.0) / 2.0).abs() < 1e-9);
    }

    /// Permuting subjects within an arm leaves the rank profile unchanged.
    #[test]
    fn profile_invariant_under_subject_permutation(
        x in finite_vec(2, 20),
        y in finite_vec(2, 20),
        seed in any::<u64>(),
    ) {
        let ds = pair(x.clone(), y.clone());
        let p1 = pair_rank_profile(&ds, 0);

        // deterministic Fisher-Yates from the seed
        let mut xp = x;
        let mut s = seed;
        for i in (1..xp.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            xp.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p2 = pair_rank_profile(&pair(xp, y), 0);
        prop_assert_eq!(p1.rbar_control, p2.rbar_control);
        prop_assert_eq!(p1.rbar_dose, p2.rbar_dose);
    }

    /// θ̂ is bounded and exactly antisymmetric under swapping the arms.
    #[test]
    fn theta_bounded_and_antisymmetric(x in tied_vec(2, 20), y in tied_vec(2, 20)) {
        let fwd = theta_hat(&pair(x.clone(), y.clone()), 0).theta[(0, 0)];
        let rev = theta_hat(&pair(y, x), 0).theta[(0, 0)];
        prop_assert!(fwd.abs() <= 1.0);
        prop_assert_eq!(fwd, -rev);
    }

    /// θ̂ only depends on the joint ordering: a strictly increasing
    /// transform applied to both arms changes nothing.
    #[test]
    fn theta_invariant_under_increasing_transform(
        x in finite_vec(2, 20),
        y in finite_vec(2, 20),
        scale in 1u8..4,
    ) {
        let f = |v: f64| match scale {
            1 => 2.0 * v + 3.0,
            2 => v * v * v,
            _ => v + v.abs() * v, // v·(1 + |v|), strictly increasing
        };
        let base = theta_hat(&pair(x.clone(), y.clone()), 0).theta[(0, 0)];
        let mapped = theta_hat(
            &pair(x.into_iter().map(f).collect(), y.into_iter().map(f).collect()),
            0,
        )
        .theta[(0, 0)];
        prop_assert_eq!(base, mapped);
    }

    /// Harmonization preserves shape and absolute values everywhere.
    #[test]
    fn harmonize_preserves_magnitudes(
        x in finite_vec(4, 24),
        y in finite_vec(4, 24),
        worse in any::<bool>(),
    ) {
        let x = &x[..x.len() / 2 * 2];
        let y = &y[..y.len() / 2 * 2];
        let ds = TrialDataset::new(
            Arm::new("c".into(), 1, 2, x.to_vec()).unwrap(),
            vec![Arm::new("d".into(), 1, 2, y.to_vec()).unwrap()],
            vec!["a".into(), "b".into()],
            1,
        )
        .unwrap();
        let specs = [
            OutcomeSpec { name: "a".into(), direction: if worse { Direction::HigherIsWorse } else { Direction::HigherIsBetter } },
            OutcomeSpec { name: "b".into(), direction: Direction::HigherIsBetter },
        ];
        let out = harmonize_directions(ds.clone(), &specs).unwrap();
        prop_assert_eq!(out.control().n_subjects(), ds.control().n_subjects());
        for (a, b) in out.control().values().iter().zip(ds.control().values()) {
            prop_assert_eq!(a.abs(), b.abs());
        }
        for (a, b) in out.dose(0).values().iter().zip(ds.dose(0).values()) {
            prop_assert_eq!(a.abs(), b.abs());
        }
    }
}
