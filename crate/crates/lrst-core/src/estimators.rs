//! Relative-effect estimators, moment estimators of the placement
//! covariances, and assembly of the asymptotic covariance blocks of the
//! per-visit rank-difference vector.
//!
//! All pairwise comparisons split ties: the indicator 1(a < b) is evaluated
//! as 1(a<b) + ½·1(a=b) throughout, which keeps the rank–θ identity
//! `R̄_y·tk − R̄_x·tk = (N₁/2)·θ̂_tk` exact under ties and matches the
//! mid-rank convention of the ranking step.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{SampleRatios, TrialDataset};
use crate::numerics::linalg::Matrix;

/// Estimated relative treatment effects θ̂_{tk} = P̂(X<Y) − P̂(X>Y) for one
/// control-vs-dose pair, with their grand mean over all (t, k).
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseEffects {
    /// T×K matrix of θ̂_{tk}; every entry lies in [−1, 1].
    pub theta: Matrix,
    /// Mean of all matrix entries, θ̄.
    pub theta_bar: f64,
}

/// 4-index array over (t₁, k₁, t₂, k₂).
#[derive(Debug, Clone, PartialEq)]
pub struct CovArray {
    n_visits: usize,
    n_outcomes: usize,
    data: Vec<f64>,
}

impl CovArray {
    fn zeros(n_visits: usize, n_outcomes: usize) -> Self {
        let cells = n_visits * n_outcomes;
        CovArray {
            n_visits,
            n_outcomes,
            data: vec![0.0; cells * cells],
        }
    }

    pub fn n_visits(&self) -> usize {
        self.n_visits
    }

    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    #[inline]
    fn cell(&self, t: usize, k: usize) -> usize {
        t * self.n_outcomes + k
    }

    #[inline]
    pub fn get(&self, t1: usize, k1: usize, t2: usize, k2: usize) -> f64 {
        let cells = self.n_visits * self.n_outcomes;
        self.data[self.cell(t1, k1) * cells + self.cell(t2, k2)]
    }

    pub fn max_abs_diff(&self, other: &CovArray) -> f64 {
        assert_eq!(
            (self.n_visits, self.n_outcomes),
            (other.n_visits, other.n_outcomes)
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The two within-pair covariance arrays of one control-vs-dose pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CovTerms {
    /// Covariance across control subjects of their dose-side placements.
    pub c: CovArray,
    /// Covariance across dose subjects of their control-side placements.
    pub d: CovArray,
}

/// Tie-split placement of `query` within the sorted sample `sorted_ref`:
/// (#{r < q} + ½·#{r = q}) / |ref|.
#[inline]
fn placement(sorted_ref: &[f64], query: f64) -> f64 {
    let below = sorted_ref.partition_point(|&r| r < query);
    let not_above = sorted_ref.partition_point(|&r| r <= query);
    (below as f64 + 0.5 * (not_above - below) as f64) / sorted_ref.len() as f64
}

/// Per-cell placements of one pair: `control_in_dose[i·cells + u]` is the
/// placement of control subject i's value within the dose sample at cell u
/// (u = t·K + k), and vice versa.
struct PairPlacements {
    n_control: usize,
    n_dose: usize,
    control_in_dose: Vec<f64>,
    dose_in_control: Vec<f64>,
    theta: Vec<f64>,
}

fn pair_placements(ds: &TrialDataset, dose: usize) -> PairPlacements {
    let t_len = ds.n_visits();
    let k_len = ds.n_outcomes();
    let cells = t_len * k_len;
    let control = ds.control();
    let treated = ds.dose(dose);
    let n_x = control.n_subjects();
    let n_y = treated.n_subjects();

    let mut control_in_dose = vec![0.0; n_x * cells];
    let mut dose_in_control = vec![0.0; n_y * cells];
    let mut theta = vec![0.0; cells];

    for t in 0..t_len {
        for k in 0..k_len {
            let u = t * k_len + k;
            let xs = control.column(t, k);
            let ys = treated.column(t, k);
            let mut xs_sorted = xs.clone();
            let mut ys_sorted = ys.clone();
            xs_sorted.sort_unstable_by(f64::total_cmp);
            ys_sorted.sort_unstable_by(f64::total_cmp);

            for (i, &x) in xs.iter().enumerate() {
                control_in_dose[i * cells + u] = placement(&ys_sorted, x);
            }
            // Accumulate the undivided win counts (#{x < y} + ½#{x = y});
            // they are exact multiples of ½, so θ̂ is exactly 0 for
            // identical samples and exactly antisymmetric under arm swap.
            let mut win_count = 0.0;
            for (j, &y) in ys.iter().enumerate() {
                let below = xs_sorted.partition_point(|&r| r < y);
                let not_above = xs_sorted.partition_point(|&r| r <= y);
                let count = below as f64 + 0.5 * (not_above - below) as f64;
                dose_in_control[j * cells + u] = count / n_x as f64;
                win_count += count;
            }
            // θ̂ = P̂(X<Y) − P̂(X>Y) with ties contributing zero
            let pairs = (n_x * n_y) as f64;
            theta[u] = (2.0 * win_count - pairs) / pairs;
        }
    }

    PairPlacements {
        n_control: n_x,
        n_dose: n_y,
        control_in_dose,
        dose_in_control,
        theta,
    }
}

/// Empirical covariance of placement rows around fixed per-cell centres:
/// out[u][v] = (1/n)·Σ_s (a[s·cells+u] − ca[u])·(b[s·cells+v] − cb[v]).
fn placement_covariance(
    a: &[f64],
    centers_a: &[f64],
    b: &[f64],
    centers_b: &[f64],
    n: usize,
    n_visits: usize,
    n_outcomes: usize,
) -> CovArray {
    let cells = n_visits * n_outcomes;
    debug_assert_eq!(a.len(), n * cells);
    debug_assert_eq!(b.len(), n * cells);
    let mut out = CovArray::zeros(n_visits, n_outcomes);
    for s in 0..n {
        let ra = &a[s * cells..(s + 1) * cells];
        let rb = &b[s * cells..(s + 1) * cells];
        for u in 0..cells {
            let da = ra[u] - centers_a[u];
            let row = &mut out.data[u * cells..(u + 1) * cells];
            for v in 0..cells {
                row[v] += da * (rb[v] - centers_b[v]);
            }
        }
    }
    let inv = 1.0 / n as f64;
    for x in &mut out.data {
        *x *= inv;
    }
    out
}

fn centers_control_side(theta: &[f64]) -> Vec<f64> {
    // E over control subjects of the dose-side placement is (1 − θ̂)/2
    theta.iter().map(|&th| (1.0 - th) / 2.0).collect()
}

fn centers_dose_side(theta: &[f64]) -> Vec<f64> {
    theta.iter().map(|&th| (1.0 + th) / 2.0).collect()
}

/// Relative treatment effects of `dose` versus the control.
pub fn theta_hat(ds: &TrialDataset, dose: usize) -> PairwiseEffects {
    let pp = pair_placements(ds, dose);
    effects_from_theta(&pp.theta, ds.n_visits(), ds.n_outcomes())
}

fn effects_from_theta(theta: &[f64], n_visits: usize, n_outcomes: usize) -> PairwiseEffects {
    let mut m = Matrix::zeros(n_visits, n_outcomes);
    let mut sum = 0.0;
    for t in 0..n_visits {
        for k in 0..n_outcomes {
            let th = theta[t * n_outcomes + k];
            m[(t, k)] = th;
            sum += th;
        }
    }
    PairwiseEffects {
        theta: m,
        theta_bar: sum / (n_visits * n_outcomes) as f64,
    }
}

/// ĉ_{t₁k₁t₂k₂}: covariance across control subjects of their dose-side
/// placements, centred at (1 − θ̂)/2.
pub fn c_hat(ds: &TrialDataset, dose: usize) -> CovArray {
    let pp = pair_placements(ds, dose);
    let centers = centers_control_side(&pp.theta);
    placement_covariance(
        &pp.control_in_dose,
        &centers,
        &pp.control_in_dose,
        &centers,
        pp.n_control,
        ds.n_visits(),
        ds.n_outcomes(),
    )
}

/// d̂_{t₁k₁t₂k₂}: covariance across dose subjects of their control-side
/// placements, centred at (1 + θ̂)/2.
pub fn d_hat(ds: &TrialDataset, dose: usize) -> CovArray {
    let pp = pair_placements(ds, dose);
    let centers = centers_dose_side(&pp.theta);
    placement_covariance(
        &pp.dose_in_control,
        &centers,
        &pp.dose_in_control,
        &centers,
        pp.n_dose,
        ds.n_visits(),
        ds.n_outcomes(),
    )
}

/// Both within-pair covariance arrays of one pair, sharing one placement
/// pass.
pub fn cov_terms(ds: &TrialDataset, dose: usize) -> CovTerms {
    let pp = pair_placements(ds, dose);
    cov_terms_from_placements(&pp, ds.n_visits(), ds.n_outcomes())
}

fn cov_terms_from_placements(pp: &PairPlacements, n_visits: usize, n_outcomes: usize) -> CovTerms {
    let ca = centers_control_side(&pp.theta);
    let cb = centers_dose_side(&pp.theta);
    CovTerms {
        c: placement_covariance(
            &pp.control_in_dose,
            &ca,
            &pp.control_in_dose,
            &ca,
            pp.n_control,
            n_visits,
            n_outcomes,
        ),
        d: placement_covariance(
            &pp.dose_in_control,
            &cb,
            &pp.dose_in_control,
            &cb,
            pp.n_dose,
            n_visits,
            n_outcomes,
        ),
    }
}

/// ĉ^{(x,y_i,y_j)}: covariance across control subjects of dose-i placements
/// at (t₁,k₁) against dose-j placements at (t₂,k₂).
pub fn c_cross_hat(ds: &TrialDataset, dose_i: usize, dose_j: usize) -> CovArray {
    assert_ne!(dose_i, dose_j, "cross term needs two distinct dose arms");
    let pi = pair_placements(ds, dose_i);
    let pj = pair_placements(ds, dose_j);
    cross_from_placements(&pi, &pj, ds.n_visits(), ds.n_outcomes())
}

fn cross_from_placements(
    pi: &PairPlacements,
    pj: &PairPlacements,
    n_visits: usize,
    n_outcomes: usize,
) -> CovArray {
    debug_assert_eq!(pi.n_control, pj.n_control);
    placement_covariance(
        &pi.control_in_dose,
        &centers_control_side(&pi.theta),
        &pj.control_in_dose,
        &centers_control_side(&pj.theta),
        pi.n_control,
        n_visits,
        n_outcomes,
    )
}

/// Within-pair T×T covariance block of the per-visit rank differences
/// (scaled by 1/√N):
///
/// Σ̂^{(x,y_a)}_{t₁t₂} = (λ_x + λ_{y_a})·K⁻²·Σ_{k₁k₂} [(1 + 1/λ_{x,y_a})·ĉ
///                        + (1 + λ_{x,y_a})·d̂]
///
/// with λ_{x,y_a} = n_x/n_{y_a}, so the coefficients are N_a/n_x and
/// N_a/n_{y_a} — the classical projection weights of the two-sample rank
/// statistic.
pub fn sigma_within(cov: &CovTerms, ratios: &SampleRatios, dose: usize) -> Matrix {
    let t_len = cov.c.n_visits();
    let k_len = cov.c.n_outcomes();
    let ratio = ratios.control_to_dose(dose);
    let w_c = 1.0 + 1.0 / ratio;
    let w_d = 1.0 + ratio;
    let coeff = (ratios.lambda_control() + ratios.lambda_dose(dose)) / (k_len * k_len) as f64;
    let mut out = Matrix::zeros(t_len, t_len);
    for t1 in 0..t_len {
        for t2 in 0..t_len {
            let mut s = 0.0;
            for k1 in 0..k_len {
                for k2 in 0..k_len {
                    s += w_c * cov.c.get(t1, k1, t2, k2) + w_d * cov.d.get(t1, k1, t2, k2);
                }
            }
            out[(t1, t2)] = coeff * s;
        }
    }
    out
}

/// Cross-pair T×T covariance block for doses i and j sharing the control:
///
/// Σ̂^{(x,y_i,y_j)}_{t₁t₂} = K⁻²·Σ_{k₁k₂} (1 + n_{y_i}/n_x)(λ_x + λ_{y_j})·ĉ^{(x,y_i,y_j)}
pub fn sigma_cross(
    cross: &CovArray,
    ratios: &SampleRatios,
    dose_i: usize,
    dose_j: usize,
) -> Matrix {
    let t_len = cross.n_visits();
    let k_len = cross.n_outcomes();
    let coeff = (1.0 + 1.0 / ratios.control_to_dose(dose_i))
        * (ratios.lambda_control() + ratios.lambda_dose(dose_j))
        / (k_len * k_len) as f64;
    let mut out = Matrix::zeros(t_len, t_len);
    for t1 in 0..t_len {
        for t2 in 0..t_len {
            let mut s = 0.0;
            for k1 in 0..k_len {
                for k2 in 0..k_len {
                    s += cross.get(t1, k1, t2, k2);
                }
            }
            out[(t1, t2)] = coeff * s;
        }
    }
    out
}

/// All within and cross covariance blocks of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaBlocks {
    /// Σ̂^{(x,y_a)} per dose arm.
    pub within: Vec<Matrix>,
    /// Σ̂^{(x,y_i,y_j)} keyed by (i, j) with i < j.
    pub cross: BTreeMap<(usize, usize), Matrix>,
    pub ratios: SampleRatios,
}

impl SigmaBlocks {
    /// J'Σ̂^{(x,y_a)}J — the variance form of dose a's time-summed rank
    /// difference (scaled by 1/√N).
    pub fn within_form(&self, dose: usize) -> f64 {
        self.within[dose].grand_sum()
    }

    /// J'Σ̂^{(x,y_i,y_j)}J; symmetric in (i, j).
    pub fn cross_form(&self, dose_i: usize, dose_j: usize) -> f64 {
        let key = (dose_i.min(dose_j), dose_i.max(dose_j));
        self.cross[&key].grand_sum()
    }

    /// The full AT×AT covariance matrix with the cross blocks mirrored.
    pub fn assembled(&self) -> Matrix {
        let a_len = self.within.len();
        let t_len = self.within[0].rows();
        let mut out = Matrix::zeros(a_len * t_len, a_len * t_len);
        for (a, block) in self.within.iter().enumerate() {
            for t1 in 0..t_len {
                for t2 in 0..t_len {
                    out[(a * t_len + t1, a * t_len + t2)] = block[(t1, t2)];
                }
            }
        }
        for (&(i, j), block) in &self.cross {
            for t1 in 0..t_len {
                for t2 in 0..t_len {
                    out[(i * t_len + t1, j * t_len + t2)] = block[(t1, t2)];
                    out[(j * t_len + t2, i * t_len + t1)] = block[(t1, t2)];
                }
            }
        }
        out
    }
}

/// Compute every within-pair and cross-pair block. Placements are computed
/// once per pair and shared between the within and cross estimators.
pub fn assemble_sigma(ds: &TrialDataset) -> SigmaBlocks {
    let a_len = ds.n_dose_arms();
    let ratios = ds.sample_ratios();
    let placements: Vec<PairPlacements> = (0..a_len).map(|a| pair_placements(ds, a)).collect();

    let within = placements
        .iter()
        .enumerate()
        .map(|(a, pp)| {
            let terms = cov_terms_from_placements(pp, ds.n_visits(), ds.n_outcomes());
            sigma_within(&terms, &ratios, a)
        })
        .collect();

    let mut cross = BTreeMap::new();
    for i in 0..a_len {
        for j in (i + 1)..a_len {
            let arr = cross_from_placements(
                &placements[i],
                &placements[j],
                ds.n_visits(),
                ds.n_outcomes(),
            );
            cross.insert((i, j), sigma_cross(&arr, &ratios, i, j));
        }
    }

    SigmaBlocks {
        within,
        cross,
        ratios,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Arm, TrialDataset};
    use crate::numerics::rng::CounterRng;
    use alloc::format;
    use alloc::string::ToString;

    fn dataset(arms: &[(&str, Vec<f64>)], t: usize, k: usize) -> TrialDataset {
        let control = Arm::new(arms[0].0.to_string(), t, k, arms[0].1.clone()).unwrap();
        let doses = arms[1..]
            .iter()
            .map(|(l, v)| Arm::new(l.to_string(), t, k, v.clone()).unwrap())
            .collect();
        TrialDataset::new(
            control,
            doses,
            (0..k).map(|i| format!("y{i}")).collect(),
            t,
        )
        .unwrap()
    }

    #[test]
    fn theta_complete_separation() {
        let ds = dataset(&[("c", vec![1.0, 2.0]), ("d", vec![3.0, 4.0])], 1, 1);
        let eff = theta_hat(&ds, 0);
        assert_eq!(eff.theta[(0, 0)], 1.0);
        assert_eq!(eff.theta_bar, 1.0);
    }

    #[test]
    fn theta_identical_samples_is_zero() {
        // 3 subjects × 2 visits; odd counts exercise the inexact divisions
        let v = vec![0.5, -2.0, 3.0, 1.25, 0.0, -7.5];
        let ds = dataset(&[("c", v.clone()), ("d", v)], 2, 1);
        let eff = theta_hat(&ds, 0);
        for t in 0..2 {
            assert_eq!(eff.theta[(t, 0)], 0.0);
        }
        assert_eq!(eff.theta_bar, 0.0);
    }

    #[test]
    fn theta_interleaved_pair() {
        let ds = dataset(&[("c", vec![1.0, 3.0]), ("d", vec![2.0, 4.0])], 1, 1);
        // pairs: (1,2)+ (1,4)+ (3,2)- (3,4)+ → 2/4
        assert_eq!(theta_hat(&ds, 0).theta[(0, 0)], 0.5);
    }

    #[test]
    fn theta_antisymmetric_under_arm_swap() {
        let mut rng = CounterRng::new(3);
        let x: Vec<f64> = (0..12).map(|_| rng.next_normal()).collect();
        let y: Vec<f64> = (0..15).map(|_| rng.next_normal()).collect();
        let fwd = dataset(&[("c", x.clone()), ("d", y.clone())], 1, 1);
        let rev = dataset(&[("c", y), ("d", x)], 1, 1);
        let a = theta_hat(&fwd, 0).theta[(0, 0)];
        let b = theta_hat(&rev, 0).theta[(0, 0)];
        assert!((a + b).abs() < 1e-15);
    }

    #[test]
    fn single_reference_subject_has_zero_deviations() {
        // With one control subject the centring (1−θ̂)/2 equals the single
        // placement value, so the covariance vanishes identically. Dyadic
        // values keep the float identity exact.
        let a = [0.5];
        let centers = [0.5];
        let cov = placement_covariance(&a, &centers, &a, &centers, 1, 1, 1);
        assert_eq!(cov.get(0, 0, 0, 0), 0.0);
    }

    #[test]
    fn iid_continuous_variance_approaches_one_twelfth() {
        // Monte-Carlo oracle: Var of the empirical CDF evaluation of an iid
        // uniform is 1/12 in the large-sample limit.
        let n = 100_000;
        let mut rng = CounterRng::new(41);
        let xs: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let ds = dataset(&[("c", xs), ("d", ys)], 1, 1);
        let c = c_hat(&ds, 0);
        let d = d_hat(&ds, 0);
        assert!((c.get(0, 0, 0, 0) - 1.0 / 12.0).abs() < 0.003, "c = {}", c.get(0, 0, 0, 0));
        assert!((d.get(0, 0, 0, 0) - 1.0 / 12.0).abs() < 0.003, "d = {}", d.get(0, 0, 0, 0));
    }

    #[test]
    fn cross_with_duplicated_dose_equals_within_c() {
        let mut rng = CounterRng::new(8);
        let x: Vec<f64> = (0..8).map(|_| rng.next_normal()).collect();
        let y: Vec<f64> = (0..6).map(|_| rng.next_normal()).collect();
        let ds = dataset(&[("c", x), ("d1", y.clone()), ("d2", y)], 2, 1);
        let cross = c_cross_hat(&ds, 0, 1);
        let within = c_hat(&ds, 0);
        assert!(cross.max_abs_diff(&within) < 1e-15);
    }

    #[test]
    fn sigma_within_zero_arrays_give_zero() {
        let cov = CovTerms {
            c: CovArray::zeros(2, 2),
            d: CovArray::zeros(2, 2),
        };
        let ratios = dataset(&[("c", vec![1.0, 2.0]), ("d", vec![0.0, 1.0])], 1, 1).sample_ratios();
        let m = sigma_within(&cov, &ratios, 0);
        assert_eq!(m.grand_sum(), 0.0);
    }

    #[test]
    fn sigma_within_hand_evaluation() {
        // K = 1, T = 1, equal arms inside a 4-arm trial: λx = λy = 1/4,
        // λ_{x,y} = 1, so both projection weights are 2 and
        // entry = (1/2)·(2·c + 2·d) = (1/2)·(4/12) = 1/6 at c = d = 1/12.
        let mut c = CovArray::zeros(1, 1);
        c.data[0] = 1.0 / 12.0;
        let mut d = CovArray::zeros(1, 1);
        d.data[0] = 1.0 / 12.0;
        let n = 10;
        let ds = dataset(
            &[
                ("c", (0..n).map(|i| i as f64).collect()),
                ("d1", (0..n).map(|i| i as f64 + 0.5).collect()),
                ("d2", (0..n).map(|i| i as f64 + 0.25).collect()),
                ("d3", (0..n).map(|i| i as f64 + 0.75).collect()),
            ],
            1,
            1,
        );
        let ratios = ds.sample_ratios();
        let m = sigma_within(&CovTerms { c, d }, &ratios, 0);
        assert!((m[(0, 0)] - 1.0 / 6.0).abs() < 1e-15, "got {}", m[(0, 0)]);
    }

    #[test]
    fn sigma_within_symmetric_for_symmetric_input() {
        let mut rng = CounterRng::new(15);
        let ds = dataset(
            &[
                ("c", (0..20).map(|_| rng.next_normal()).collect()),
                ("d", (0..16).map(|_| rng.next_normal()).collect()),
            ],
            2,
            2,
        );
        let terms = cov_terms(&ds, 0);
        let m = sigma_within(&terms, &ds.sample_ratios(), 0);
        assert!(m.is_symmetric(1e-14));
    }

    #[test]
    fn cross_coefficient_forms_agree() {
        // (1 + n_i/n_x)(λx + λ_j) must equal (1 + n_j/n_x)(λx + λ_i):
        // both reduce to (n_x+n_i)(n_x+n_j)/(n_x·N).
        let ds = dataset(
            &[
                ("c", (0..9).map(|i| i as f64).collect()),
                ("d1", (0..5).map(|i| i as f64 + 0.3).collect()),
                ("d2", (0..7).map(|i| i as f64 + 0.6).collect()),
            ],
            1,
            1,
        );
        let r = ds.sample_ratios();
        let a = (1.0 + 1.0 / r.control_to_dose(0)) * (r.lambda_control() + r.lambda_dose(1));
        let b = (1.0 + 1.0 / r.control_to_dose(1)) * (r.lambda_control() + r.lambda_dose(0));
        assert!((a - b).abs() < 1e-15);
        let direct = (9.0 + 5.0) * (9.0 + 7.0) / (9.0 * 21.0);
        assert!((a - direct).abs() < 1e-15);
    }

    #[test]
    fn assemble_single_dose_has_no_cross_blocks() {
        let ds = dataset(
            &[("c", vec![1.0, 2.0, 5.0]), ("d", vec![0.5, 2.5, 4.0])],
            1,
            1,
        );
        let blocks = assemble_sigma(&ds);
        assert_eq!(blocks.within.len(), 1);
        assert!(blocks.cross.is_empty());
    }

    #[test]
    fn assemble_three_doses_has_three_cross_blocks() {
        let mut rng = CounterRng::new(2);
        let arms: Vec<(&str, Vec<f64>)> = [("c", 8), ("d1", 6), ("d2", 7), ("d3", 5)]
            .iter()
            .map(|&(l, n)| (l, (0..n * 2).map(|_| rng.next_normal()).collect()))
            .collect();
        let ds = dataset(&arms, 2, 1);
        let blocks = assemble_sigma(&ds);
        assert_eq!(blocks.within.len(), 3);
        assert_eq!(blocks.cross.len(), 3);
        let full = blocks.assembled();
        assert_eq!(full.rows(), 6);
        assert!(full.is_symmetric(0.0), "assembled matrix must be exactly symmetric");
    }

    #[test]
    fn relabeling_doses_permutes_blocks() {
        let mut rng = CounterRng::new(21);
        let x: Vec<f64> = (0..10).map(|_| rng.next_normal()).collect();
        let y1: Vec<f64> = (0..8).map(|_| rng.next_normal()).collect();
        let y2: Vec<f64> = (0..6).map(|_| rng.next_normal()).collect();
        let fwd = dataset(&[("c", x.clone()), ("d1", y1.clone()), ("d2", y2.clone())], 1, 1);
        let rev = dataset(&[("c", x), ("d2", y2), ("d1", y1)], 1, 1);
        let bf = assemble_sigma(&fwd);
        let br = assemble_sigma(&rev);
        assert!(bf.within[0].max_abs_diff(&br.within[1]) < 1e-15);
        assert!(bf.within[1].max_abs_diff(&br.within[0]) < 1e-15);
        // cross block swaps orientation: Σ^{(x,1,2)}_{t1,t2} = Σ^{(x,2,1)}_{t2,t1}
        let a = &bf.cross[&(0, 1)];
        let b = &br.cross[&(0, 1)];
        assert!(a.max_abs_diff(&b.transposed()) < 1e-15);
    }

    #[test]
    fn theta_matrix_entries_bounded() {
        let mut rng = CounterRng::new(33);
        let ds = dataset(
            &[
                ("c", (0..24).map(|_| rng.next_normal()).collect()),
                ("d", (0..18).map(|_| rng.next_normal()).collect()),
            ],
            3,
            2,
        );
        let eff = theta_hat(&ds, 0);
        for t in 0..3 {
            for k in 0..2 {
                assert!(eff.theta[(t, k)].abs() <= 1.0);
            }
        }
        assert!(eff.theta_bar.abs() <= 1.0);
    }
}
