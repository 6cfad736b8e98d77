//! Trial panel representation: a complete-case tensor of change-from-baseline
//! values indexed by (arm, subject, visit, outcome).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Direction of clinical benefit on an outcome scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    HigherIsBetter,
    HigherIsWorse,
}

/// Name and benefit direction of one outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSpec {
    pub name: String,
    pub direction: Direction,
}

/// One arm's panel: `n_subjects` × `n_visits` × `n_outcomes` values,
/// subject-major (`values[i * T * K + t * K + k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    label: String,
    n_visits: usize,
    n_outcomes: usize,
    values: Vec<f64>,
}

impl Arm {
    pub fn new(
        label: String,
        n_visits: usize,
        n_outcomes: usize,
        values: Vec<f64>,
    ) -> Result<Self, DatasetError> {
        let cell = n_visits * n_outcomes;
        if cell == 0 {
            return Err(DatasetError::EmptyShape);
        }
        if values.is_empty() || !values.len().is_multiple_of(cell) {
            return Err(DatasetError::ShapeMismatch {
                label,
                len: values.len(),
                cell,
            });
        }
        let n = values.len() / cell;
        if n < 2 {
            return Err(DatasetError::TooFewSubjects { label, n });
        }
        for (pos, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(DatasetError::NonFiniteValue {
                    label,
                    subject: pos / cell,
                    visit: (pos % cell) / n_outcomes,
                    outcome: pos % n_outcomes,
                });
            }
        }
        Ok(Arm {
            label,
            n_visits,
            n_outcomes,
            values,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_subjects(&self) -> usize {
        self.values.len() / (self.n_visits * self.n_outcomes)
    }

    #[inline]
    pub fn value(&self, subject: usize, visit: usize, outcome: usize) -> f64 {
        self.values[subject * self.n_visits * self.n_outcomes + visit * self.n_outcomes + outcome]
    }

    /// All subjects' values at one (visit, outcome) cell, in subject order.
    pub fn column(&self, visit: usize, outcome: usize) -> Vec<f64> {
        let stride = self.n_visits * self.n_outcomes;
        let off = visit * self.n_outcomes + outcome;
        (0..self.n_subjects())
            .map(|i| self.values[i * stride + off])
            .collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Validated multi-arm panel: one control arm plus `A ≥ 1` dose arms sharing
/// the same (visit, outcome) grid. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialDataset {
    control: Arm,
    doses: Vec<Arm>,
    outcome_names: Vec<String>,
    n_visits: usize,
}

impl TrialDataset {
    pub fn new(
        control: Arm,
        doses: Vec<Arm>,
        outcome_names: Vec<String>,
        n_visits: usize,
    ) -> Result<Self, DatasetError> {
        if doses.is_empty() {
            return Err(DatasetError::NoDoseArms);
        }
        if n_visits == 0 || outcome_names.is_empty() {
            return Err(DatasetError::EmptyShape);
        }
        for a in core::iter::once(&control).chain(doses.iter()) {
            if a.n_visits != n_visits || a.n_outcomes != outcome_names.len() {
                return Err(DatasetError::ArmShapeMismatch {
                    label: a.label.clone(),
                });
            }
        }
        for (i, name) in outcome_names.iter().enumerate() {
            if outcome_names[..i].contains(name) {
                return Err(DatasetError::DuplicateOutcome { name: name.clone() });
            }
        }
        for (i, a) in doses.iter().enumerate() {
            if a.label == control.label || doses[..i].iter().any(|b| b.label == a.label) {
                return Err(DatasetError::DuplicateArmLabel {
                    label: a.label.clone(),
                });
            }
        }
        Ok(TrialDataset {
            control,
            doses,
            outcome_names,
            n_visits,
        })
    }

    /// Number of post-baseline visits, `T`.
    pub fn n_visits(&self) -> usize {
        self.n_visits
    }

    /// Number of outcomes, `K`.
    pub fn n_outcomes(&self) -> usize {
        self.outcome_names.len()
    }

    /// Number of dose arms, `A`.
    pub fn n_dose_arms(&self) -> usize {
        self.doses.len()
    }

    /// Total subject count across all arms, `N`.
    pub fn total_subjects(&self) -> usize {
        self.control.n_subjects() + self.doses.iter().map(Arm::n_subjects).sum::<usize>()
    }

    pub fn control(&self) -> &Arm {
        &self.control
    }

    pub fn dose(&self, a: usize) -> &Arm {
        &self.doses[a]
    }

    pub fn doses(&self) -> &[Arm] {
        &self.doses
    }

    pub fn outcome_names(&self) -> &[String] {
        &self.outcome_names
    }

    /// Sub-trial with the control and a single dose arm, used by the
    /// per-dose univariate tests.
    pub fn pair_subset(&self, dose: usize) -> TrialDataset {
        TrialDataset {
            control: self.control.clone(),
            doses: alloc::vec![self.doses[dose].clone()],
            outcome_names: self.outcome_names.clone(),
            n_visits: self.n_visits,
        }
    }

    /// Exact finite-sample allocation ratios.
    pub fn sample_ratios(&self) -> SampleRatios {
        SampleRatios {
            n_control: self.control.n_subjects(),
            n_doses: self.doses.iter().map(Arm::n_subjects).collect(),
        }
    }
}

/// Negate every outcome marked `HigherIsWorse` so that larger values are
/// clinically favorable everywhere. Applying the same specs twice restores
/// the original values.
pub fn harmonize_directions(
    ds: TrialDataset,
    specs: &[OutcomeSpec],
) -> Result<TrialDataset, DatasetError> {
    if specs.len() != ds.n_outcomes() {
        return Err(DatasetError::OutcomeCountMismatch {
            expected: ds.n_outcomes(),
            actual: specs.len(),
        });
    }
    for (name, spec) in ds.outcome_names.iter().zip(specs) {
        if *name != spec.name {
            return Err(DatasetError::OutcomeNameMismatch {
                expected: name.clone(),
                actual: spec.name.clone(),
            });
        }
    }
    let flip: Vec<bool> = specs
        .iter()
        .map(|s| s.direction == Direction::HigherIsWorse)
        .collect();
    if flip.iter().all(|f| !f) {
        return Ok(ds);
    }
    let k = ds.n_outcomes();
    let mut ds = ds;
    for arm in core::iter::once(&mut ds.control).chain(ds.doses.iter_mut()) {
        for (pos, v) in arm.values.iter_mut().enumerate() {
            if flip[pos % k] {
                *v = -*v;
            }
        }
    }
    Ok(ds)
}

/// Finite-sample plug-ins for the allocation ratios of the asymptotic
/// covariance: arm shares of the grand total and control-to-dose ratios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRatios {
    n_control: usize,
    n_doses: Vec<usize>,
}

impl SampleRatios {
    pub fn n_control(&self) -> usize {
        self.n_control
    }

    pub fn n_dose(&self, a: usize) -> usize {
        self.n_doses[a]
    }

    pub fn n_dose_arms(&self) -> usize {
        self.n_doses.len()
    }

    pub fn n_total(&self) -> usize {
        self.n_control + self.n_doses.iter().sum::<usize>()
    }

    /// Control share of the grand total, λ_x = n_x / N.
    pub fn lambda_control(&self) -> f64 {
        self.n_control as f64 / self.n_total() as f64
    }

    /// Dose share of the grand total, λ_{y_a} = n_{y_a} / N.
    pub fn lambda_dose(&self, a: usize) -> f64 {
        self.n_doses[a] as f64 / self.n_total() as f64
    }

    /// Control-to-dose size ratio, λ_{x,y_a} = n_x / n_{y_a}.
    pub fn control_to_dose(&self, a: usize) -> f64 {
        self.n_control as f64 / self.n_doses[a] as f64
    }

    /// Pairwise total for the control and dose `a`, N_a = n_x + n_{y_a}.
    pub fn pair_total(&self, a: usize) -> usize {
        self.n_control + self.n_doses[a]
    }

    /// Control share of the pairwise total, λ_x^{y_a} = n_x / N_a.
    pub fn control_pair_share(&self, a: usize) -> f64 {
        self.n_control as f64 / self.pair_total(a) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetError {
    EmptyShape,
    NoDoseArms,
    ShapeMismatch { label: String, len: usize, cell: usize },
    ArmShapeMismatch { label: String },
    TooFewSubjects { label: String, n: usize },
    NonFiniteValue { label: String, subject: usize, visit: usize, outcome: usize },
    DuplicateArmLabel { label: String },
    DuplicateOutcome { name: String },
    OutcomeCountMismatch { expected: usize, actual: usize },
    OutcomeNameMismatch { expected: String, actual: String },
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::EmptyShape => write!(f, "dataset needs at least one visit and one outcome"),
            DatasetError::NoDoseArms => write!(f, "dataset needs at least one dose arm"),
            DatasetError::ShapeMismatch { label, len, cell } => write!(
                f,
                "arm '{label}': {len} values is not a whole number of subjects ({cell} values each)"
            ),
            DatasetError::ArmShapeMismatch { label } => {
                write!(f, "arm '{label}' disagrees with the dataset's visit/outcome grid")
            }
            DatasetError::TooFewSubjects { label, n } => {
                write!(f, "arm '{label}' has {n} subject(s); at least 2 are required")
            }
            DatasetError::NonFiniteValue { label, subject, visit, outcome } => write!(
                f,
                "arm '{label}', subject {subject}: non-finite value at visit {visit}, outcome {outcome}"
            ),
            DatasetError::DuplicateArmLabel { label } => write!(f, "duplicate arm label '{label}'"),
            DatasetError::DuplicateOutcome { name } => write!(f, "duplicate outcome '{name}'"),
            DatasetError::OutcomeCountMismatch { expected, actual } => {
                write!(f, "expected {expected} outcome specs, got {actual}")
            }
            DatasetError::OutcomeNameMismatch { expected, actual } => {
                write!(f, "outcome spec '{actual}' does not match dataset outcome '{expected}'")
            }
        }
    }
}

impl core::error::Error for DatasetError {}
