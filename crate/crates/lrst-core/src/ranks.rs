//! Mid-rank kernels and pooled pairwise ranking per (visit, outcome).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dataset::TrialDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankError {
    EmptyInput,
}

impl fmt::Display for RankError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankError::EmptyInput => write!(f, "cannot rank an empty vector"),
        }
    }
}

impl core::error::Error for RankError {}

/// Mid-ranks of `values`: 1-based ranks with each tie block replaced by the
/// mean of the ranks it occupies. The output sums to n(n+1)/2.
pub fn midranks(values: &[f64]) -> Result<Vec<f64>, RankError> {
    let n = values.len();
    if n == 0 {
        return Err(RankError::EmptyInput);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // block occupies ranks i+1 ..= j
        let mid = (i + j + 1) as f64 / 2.0;
        for &p in &order[i..j] {
            ranks[p] = mid;
        }
        i = j;
    }
    Ok(ranks)
}

/// Per-visit mean mid-ranks (averaged over subjects and outcomes) from
/// pooling the control arm with one dose arm, and their difference.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRankProfile {
    /// R̄_{x·t·}, length T.
    pub rbar_control: Vec<f64>,
    /// R̄_{y·t·}, length T.
    pub rbar_dose: Vec<f64>,
    /// `rbar_dose − rbar_control`, length T.
    pub rdiff: Vec<f64>,
}

impl PairRankProfile {
    /// Time-summed rank difference, Σ_t (R̄_{y·t·} − R̄_{x·t·}) — the
    /// numerator of the standardized component.
    pub fn rdiff_sum(&self) -> f64 {
        self.rdiff.iter().sum()
    }
}

/// For each (visit, outcome): pool control and dose values, mid-rank the
/// pooled sample, split back, then average over subjects and outcomes.
/// Pooling only ever mixes the control with a single dose arm.
pub fn pair_rank_profile(ds: &TrialDataset, dose: usize) -> PairRankProfile {
    let t_len = ds.n_visits();
    let k_len = ds.n_outcomes();
    let control = ds.control();
    let treated = ds.dose(dose);
    let n_x = control.n_subjects();
    let n_y = treated.n_subjects();

    let mut rbar_control = vec![0.0; t_len];
    let mut rbar_dose = vec![0.0; t_len];
    let mut pooled = Vec::with_capacity(n_x + n_y);
    for t in 0..t_len {
        for k in 0..k_len {
            pooled.clear();
            pooled.extend(control.column(t, k));
            pooled.extend(treated.column(t, k));
            let ranks = midranks(&pooled).expect("arms are non-empty");
            rbar_control[t] += ranks[..n_x].iter().sum::<f64>() / n_x as f64;
            rbar_dose[t] += ranks[n_x..].iter().sum::<f64>() / n_y as f64;
        }
    }
    for t in 0..t_len {
        rbar_control[t] /= k_len as f64;
        rbar_dose[t] /= k_len as f64;
    }
    let rdiff = rbar_dose
        .iter()
        .zip(&rbar_control)
        .map(|(y, x)| y - x)
        .collect();
    PairRankProfile {
        rbar_control,
        rbar_dose,
        rdiff,
    }
}
