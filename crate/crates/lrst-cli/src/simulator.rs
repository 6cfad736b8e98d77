//! Synthetic multi-arm longitudinal trial generator.
//!
//! Subjects get a zero-mean error vector over the (outcome, visit) grid with
//! a separable correlation structure — AR(1) across visits, a constant
//! correlation between outcomes — scaled by per-cell standard deviations and
//! shifted by the control mean trajectory plus a per-dose effect. Benefit
//! directions are applied at generation time, so generated datasets are
//! already harmonized (higher is better everywhere).

use lrst_core::numerics::linalg::{cholesky, Matrix};
use lrst_core::numerics::rng::{derive_seed, CounterRng};
use lrst_core::{Arm, Direction, TrialDataset};
use serde::Deserialize;

/// Stream tag separating trial-generation randomness from p-value sampling.
const TAG_TRIAL_DATA: u64 = 0x7472_6961_6c73; // "trials"
/// Stream tag for per-replication Monte-Carlo p-value seeds.
const TAG_MC_PVALUE: u64 = 0x6d63_7076; // "mcpv"

/// How the dose effect unfolds over visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectRamp {
    /// δ(t) grows linearly to the full protocol effect at the last visit.
    Linear,
    /// The full effect applies at every visit.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorModel {
    Gaussian,
    /// Multivariate t with 3 degrees of freedom, rescaled to unit variance.
    /// The test is rank-based, so this mainly demonstrates robustness.
    ScaledT,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub n_control: usize,
    /// Per-dose sample sizes; length is the number of dose arms A.
    pub n_doses: Vec<usize>,
    /// Effect multipliers α per dose arm.
    pub multipliers: Vec<f64>,
    pub outcome_names: Vec<String>,
    pub directions: Vec<Direction>,
    /// K×T control mean change-from-baseline on the raw scale.
    pub mean_change: Vec<Vec<f64>>,
    /// K×T standard deviations.
    pub sd: Vec<Vec<f64>>,
    /// Protocol effect sizes per outcome, as improvements on the
    /// harmonized scale at full ramp.
    pub effect_sizes: Vec<f64>,
    /// Lag-1 autocorrelation across visits.
    pub rho_time: f64,
    /// Between-outcome correlation.
    pub rho_outcome: f64,
    pub ramp: EffectRamp,
    pub error_model: ErrorModel,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ScenarioError {
    #[error("scenario needs at least one dose arm")]
    NoDoses,
    #[error("multipliers length {got} does not match dose-arm count {want}")]
    MultiplierLength { got: usize, want: usize },
    #[error("every arm needs at least 2 subjects")]
    TooFewSubjects,
    #[error("mean_change and sd must be K non-empty rows of equal length")]
    BadTables,
    #[error("standard deviations must be positive")]
    NonPositiveSd,
    #[error("correlations must lie in (-1, 1)")]
    BadCorrelation,
    #[error("effect multipliers must be non-negative")]
    NegativeMultiplier,
    #[error("effect_sizes length must equal the outcome count")]
    BadEffectSizes,
    #[error("outcome names/directions must match the table rows")]
    BadOutcomes,
}

/// Control-arm trajectory of the reference trial: mean changes from baseline
/// at weeks 13..78 with their SDs, for the cognitive scale (higher = worse)
/// and the disability scale (higher = better).
const ADAS_MEAN: [f64; 6] = [0.601, 2.041, 3.139, 4.297, 5.643, 6.567];
const ADAS_SD: [f64; 6] = [5.437, 5.813, 7.201, 8.151, 8.507, 9.511];
const DAD_MEAN: [f64; 6] = [-1.740, -3.539, -6.719, -9.420, -11.287, -12.958];
const DAD_SD: [f64; 6] = [12.05, 12.918, 13.797, 16.649, 17.253, 19.806];
/// Protocol effect sizes (cognitive, disability).
const DEFAULT_EFFECT_SIZES: [f64; 2] = [2.65, 6.56];

impl SimScenario {
    /// Default scenario shaped like the reference trial: K = 2 outcomes,
    /// T = 6 visits, AR(1) coefficient 0.6, between-outcome correlation
    /// 0.5, and a 3:2:…:2 allocation (each dose arm gets
    /// `round(n_control·2/3)` subjects). All multipliers start at zero.
    pub fn bapi_default(dose_arms: usize, n_control: usize) -> Self {
        let n_dose = (n_control as f64 * 2.0 / 3.0).round() as usize;
        SimScenario {
            n_control,
            n_doses: vec![n_dose; dose_arms],
            multipliers: vec![0.0; dose_arms],
            outcome_names: vec!["ADAS-cog11".into(), "DAD".into()],
            directions: vec![Direction::HigherIsWorse, Direction::HigherIsBetter],
            mean_change: vec![ADAS_MEAN.to_vec(), DAD_MEAN.to_vec()],
            sd: vec![ADAS_SD.to_vec(), DAD_SD.to_vec()],
            effect_sizes: DEFAULT_EFFECT_SIZES.to_vec(),
            rho_time: 0.6,
            rho_outcome: 0.5,
            ramp: EffectRamp::Linear,
            error_model: ErrorModel::Gaussian,
            seed: 0,
        }
    }

    pub fn n_visits(&self) -> usize {
        self.mean_change.first().map_or(0, Vec::len)
    }

    pub fn n_outcomes(&self) -> usize {
        self.mean_change.len()
    }

    pub fn dose_arms(&self) -> usize {
        self.n_doses.len()
    }

    pub fn n_total(&self) -> usize {
        self.n_control + self.n_doses.iter().sum::<usize>()
    }

    pub fn with_multipliers(&self, multipliers: Vec<f64>) -> Self {
        SimScenario {
            multipliers,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.n_doses.is_empty() {
            return Err(ScenarioError::NoDoses);
        }
        if self.multipliers.len() != self.n_doses.len() {
            return Err(ScenarioError::MultiplierLength {
                got: self.multipliers.len(),
                want: self.n_doses.len(),
            });
        }
        if self.n_control < 2 || self.n_doses.iter().any(|&n| n < 2) {
            return Err(ScenarioError::TooFewSubjects);
        }
        let t_len = self.n_visits();
        let k_len = self.n_outcomes();
        if k_len == 0 || t_len == 0 {
            return Err(ScenarioError::BadTables);
        }
        if self.mean_change.iter().any(|r| r.len() != t_len)
            || self.sd.len() != k_len
            || self.sd.iter().any(|r| r.len() != t_len)
        {
            return Err(ScenarioError::BadTables);
        }
        if self.sd.iter().flatten().any(|&s| s.is_nan() || s <= 0.0) {
            return Err(ScenarioError::NonPositiveSd);
        }
        if self.rho_time.abs() >= 1.0 || self.rho_outcome.abs() >= 1.0 {
            return Err(ScenarioError::BadCorrelation);
        }
        if self.multipliers.iter().any(|&m| m.is_nan() || m < 0.0) {
            return Err(ScenarioError::NegativeMultiplier);
        }
        if self.effect_sizes.len() != k_len {
            return Err(ScenarioError::BadEffectSizes);
        }
        if self.outcome_names.len() != k_len || self.directions.len() != k_len {
            return Err(ScenarioError::BadOutcomes);
        }
        Ok(())
    }

    /// Correlation of the error vector over cells (k, t):
    /// ρ_outcome^{1(k₁≠k₂)} · ρ_time^{|t₁−t₂|}.
    fn error_correlation(&self) -> Matrix {
        let t_len = self.n_visits();
        let k_len = self.n_outcomes();
        let dim = t_len * k_len;
        let mut m = Matrix::zeros(dim, dim);
        for k1 in 0..k_len {
            for t1 in 0..t_len {
                for k2 in 0..k_len {
                    for t2 in 0..t_len {
                        let outcome_part = if k1 == k2 { 1.0 } else { self.rho_outcome };
                        let lag = t1.abs_diff(t2) as i32;
                        m[(k1 * t_len + t1, k2 * t_len + t2)] =
                            outcome_part * self.rho_time.powi(lag);
                    }
                }
            }
        }
        m
    }

    /// Dose effect on the harmonized scale at (outcome k, visit t).
    fn effect(&self, dose: usize, k: usize, t: usize) -> f64 {
        let ramp = match self.ramp {
            EffectRamp::Linear => (t + 1) as f64 / self.n_visits() as f64,
            EffectRamp::Constant => 1.0,
        };
        self.multipliers[dose] * self.effect_sizes[k] * ramp
    }

    /// Monte-Carlo p-value seed for one replication, disjoint from the
    /// data-generation stream.
    pub fn mc_seed(&self, rep: u64) -> u64 {
        derive_seed(derive_seed(self.seed, TAG_MC_PVALUE), rep)
    }
}

/// Generate one replication of the trial. Deterministic in
/// `(scenario.seed, rep)` and independent of the order replications run in.
/// The returned dataset is harmonized: outcomes marked higher-is-worse have
/// their sign flipped at generation.
pub fn gen_trial(sc: &SimScenario, rep: u64) -> TrialDataset {
    let t_len = sc.n_visits();
    let k_len = sc.n_outcomes();
    let dim = t_len * k_len;
    let factor = cholesky(&sc.error_correlation())
        .expect("separable AR(1)/outcome correlation is positive definite");
    let signs: Vec<f64> = sc
        .directions
        .iter()
        .map(|d| match d {
            Direction::HigherIsBetter => 1.0,
            Direction::HigherIsWorse => -1.0,
        })
        .collect();

    let mut rng = CounterRng::substream(derive_seed(sc.seed, TAG_TRIAL_DATA), rep);
    let mut g = vec![0.0; dim];
    let mut e = vec![0.0; dim];

    let mut draw_arm = |n: usize, dose: Option<usize>| -> Vec<f64> {
        let mut values = Vec::with_capacity(n * dim);
        for _ in 0..n {
            rng.fill_normals(&mut g);
            factor.lower_mul_vec(&g, &mut e);
            if sc.error_model == ErrorModel::ScaledT {
                // shared chi-square denominator, rescaled to unit variance
                let df = 3.0;
                let w: f64 = (0..3).map(|_| rng.next_normal()).map(|z| z * z).sum();
                let scale = (df / w).sqrt() * ((df - 2.0) / df).sqrt();
                for v in &mut e {
                    *v *= scale;
                }
            }
            for t in 0..t_len {
                for k in 0..k_len {
                    let mean = signs[k] * sc.mean_change[k][t];
                    let shift = dose.map_or(0.0, |a| sc.effect(a, k, t));
                    values.push(mean + shift + sc.sd[k][t] * e[k * t_len + t]);
                }
            }
        }
        values
    };

    let control_values = draw_arm(sc.n_control, None);
    let dose_values: Vec<Vec<f64>> = (0..sc.dose_arms())
        .map(|a| draw_arm(sc.n_doses[a], Some(a)))
        .collect();

    let control = Arm::new("control".into(), t_len, k_len, control_values)
        .expect("generated control panel is valid");
    let doses = dose_values
        .into_iter()
        .enumerate()
        .map(|(a, v)| {
            Arm::new(format!("dose_{}", a + 1), t_len, k_len, v)
                .expect("generated dose panel is valid")
        })
        .collect();
    TrialDataset::new(control, doses, sc.outcome_names.clone(), t_len)
        .expect("generated dataset is valid")
}

/// Which study a scenario file drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Type1,
    Power,
}

/// On-disk scenario description (TOML or JSON). Unset trial-template fields
/// fall back to the built-in reference-trial defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub kind: StudyKind,
    /// Number of dose arms.
    pub doses: usize,
    pub n_control: usize,
    /// Explicit per-dose sizes; defaults to `round(n_control·2/3)` each.
    #[serde(default)]
    pub n_doses: Option<Vec<usize>>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_mc_draws")]
    pub mc_draws: usize,
    /// Power grid: one row of per-dose multipliers per grid point.
    #[serde(default)]
    pub grid: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub ramp: Option<EffectRamp>,
    #[serde(default)]
    pub error_model: Option<ErrorModel>,
    #[serde(default)]
    pub rho_time: Option<f64>,
    #[serde(default)]
    pub rho_outcome: Option<f64>,
    #[serde(default)]
    pub effect_sizes: Option<Vec<f64>>,
    #[serde(default)]
    pub mean_change: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub sd: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub outcomes: Option<Vec<crate::schema::OutcomeConfig>>,
}

fn default_replications() -> usize {
    1000
}

fn default_alpha() -> f64 {
    0.05
}

fn default_mc_draws() -> usize {
    100_000
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioFileError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("scenario parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] ScenarioError),
    #[error("alpha must lie in (0, 1)")]
    BadAlpha,
    #[error("a power scenario needs a non-empty multiplier grid")]
    MissingGrid,
    #[error("grid row {row} has {got} multipliers, expected {want}")]
    BadGridRow { row: usize, got: usize, want: usize },
    #[error("replication count must be positive")]
    NoReplications,
    #[error("mc_draws must be at least 1000")]
    TooFewDraws,
}

impl ScenarioFile {
    pub fn load(path: &std::path::Path) -> Result<Self, ScenarioFileError> {
        let text = std::fs::read_to_string(path)?;
        let file: ScenarioFile = if path.extension().and_then(|e| e.to_str()) == Some("json") {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text)?
        };
        Ok(file)
    }

    /// Build the generator scenario (zero multipliers; studies set them).
    pub fn build_scenario(&self) -> Result<SimScenario, ScenarioFileError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ScenarioFileError::BadAlpha);
        }
        if self.replications == 0 {
            return Err(ScenarioFileError::NoReplications);
        }
        if self.mc_draws < 1000 {
            return Err(ScenarioFileError::TooFewDraws);
        }
        let mut sc = SimScenario::bapi_default(self.doses, self.n_control);
        sc.seed = self.seed;
        if let Some(n_doses) = &self.n_doses {
            sc.n_doses = n_doses.clone();
            sc.multipliers = vec![0.0; n_doses.len()];
        }
        if let Some(ramp) = self.ramp {
            sc.ramp = ramp;
        }
        if let Some(model) = self.error_model {
            sc.error_model = model;
        }
        if let Some(rho) = self.rho_time {
            sc.rho_time = rho;
        }
        if let Some(rho) = self.rho_outcome {
            sc.rho_outcome = rho;
        }
        if let Some(effects) = &self.effect_sizes {
            sc.effect_sizes = effects.clone();
        }
        if let Some(mean) = &self.mean_change {
            sc.mean_change = mean.clone();
        }
        if let Some(sd) = &self.sd {
            sc.sd = sd.clone();
        }
        if let Some(outcomes) = &self.outcomes {
            sc.outcome_names = outcomes.iter().map(|o| o.name.clone()).collect();
            sc.directions = outcomes.iter().map(|o| o.direction.into()).collect();
        }
        sc.validate()?;
        Ok(sc)
    }

    /// Multiplier grid for the study: the zero point for a Type-I study,
    /// the validated `grid` rows for a power study.
    pub fn study_grid(&self) -> Result<Vec<Vec<f64>>, ScenarioFileError> {
        match self.kind {
            StudyKind::Type1 => Ok(vec![vec![0.0; self.dose_count()]]),
            StudyKind::Power => {
                let grid = self
                    .grid
                    .as_ref()
                    .filter(|g| !g.is_empty())
                    .ok_or(ScenarioFileError::MissingGrid)?;
                let want = self.dose_count();
                for (row, m) in grid.iter().enumerate() {
                    if m.len() != want {
                        return Err(ScenarioFileError::BadGridRow {
                            row,
                            got: m.len(),
                            want,
                        });
                    }
                }
                Ok(grid.clone())
            }
        }
    }

    fn dose_count(&self) -> usize {
        self.n_doses.as_ref().map_or(self.doses, Vec::len)
    }
}
