//! Standardized components, the max-type statistic, p-values, dose
//! selection, and the Bonferroni-corrected univariate comparator.

use alloc::vec::Vec;
use core::fmt;

use libm::sqrt;

use crate::dataset::TrialDataset;
use crate::estimators::{assemble_sigma, cov_terms, sigma_within, theta_hat, PairwiseEffects};
use crate::numerics::bvn::bvn_cdf;
use crate::numerics::linalg::{CorrelationMatrix, Matrix};
use crate::numerics::mvn::mvn_max_tail;
use crate::numerics::normal::{norm_cdf, norm_sf, phi};
use crate::numerics::quad::{quad, QuadError};
use crate::ranks::pair_rank_profile;

/// Estimated component correlations are clamped to this magnitude.
pub const RHO_CLAMP: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestError {
    /// J'Σ̂J ≤ 0 for a dose pair — the cell data are constant, which is
    /// invalid input rather than evidence.
    DegenerateVariance { dose: usize },
    /// `two_arm_lrst` needs exactly one dose arm.
    WrongArity { actual: usize },
}

impl fmt::Display for TestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestError::DegenerateVariance { dose } => write!(
                f,
                "degenerate variance for dose arm {dose}: the panel is constant at every pooled cell"
            ),
            TestError::WrongArity { actual } => {
                write!(f, "two-arm test needs exactly 1 dose arm, dataset has {actual}")
            }
        }
    }
}

impl core::error::Error for TestError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueMethod {
    /// One dose arm: p = 1 − Φ(z).
    ClosedFormNormal,
    /// Two dose arms: tail of the max of a correlated bivariate normal.
    ClosedFormMax2,
    /// Three or more dose arms (or forced): seeded Monte-Carlo tail.
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagnostics {
    /// The estimated correlation matrix needed the eigenvalue-floor repair.
    pub correlation_repaired: bool,
    /// At least one off-diagonal correlation hit the ±0.999 clamp.
    pub correlation_clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrstOptions {
    /// Monte-Carlo draws for the A ≥ 3 p-value path.
    pub mc_draws: usize,
    pub seed: u64,
    /// Use the Monte-Carlo path regardless of arm count.
    pub force_monte_carlo: bool,
}

impl Default for LrstOptions {
    fn default() -> Self {
        LrstOptions {
            mc_draws: 1_000_000,
            seed: 0,
            force_monte_carlo: false,
        }
    }
}

/// Result of the multi-arm longitudinal rank-sum test.
#[derive(Debug, Clone, PartialEq)]
pub struct LrstResult {
    /// Standardized z-score per dose arm (unit variance under the null).
    pub components: Vec<f64>,
    /// max_a z_a.
    pub statistic: f64,
    /// `statistic / T` — the time-averaged reporting convention. The two
    /// scales are related by a strictly monotone map, so p-values and dose
    /// selection are identical under either.
    pub statistic_per_visit: f64,
    /// A×A estimated component correlation matrix ρ̂.
    pub correlation: Matrix,
    /// One-sided p-value in [0, 1].
    pub p_value: f64,
    pub p_value_method: PValueMethod,
    /// Binomial standard error of a Monte-Carlo p-value.
    pub mc_std_error: Option<f64>,
    /// Index of the dose arm attaining the max component; ties break toward
    /// the lowest index.
    pub selected_dose: usize,
    /// θ̂ matrices per dose arm.
    pub per_pair: Vec<PairwiseEffects>,
    pub diagnostics: Diagnostics,
}

/// Index of the largest component; exact ties go to the lowest dose index.
pub fn select_dose(components: &[f64]) -> usize {
    let mut best = 0;
    for (i, &z) in components.iter().enumerate().skip(1) {
        if z > components[best] {
            best = i;
        }
    }
    best
}

/// Standardized component for one dose arm: the time-summed rank difference
/// divided by its estimated standard error √(N·J'Σ̂J).
pub fn component_zscore(ds: &TrialDataset, dose: usize) -> Result<f64, TestError> {
    let ratios = ds.sample_ratios();
    let terms = cov_terms(ds, dose);
    let variance_form = sigma_within(&terms, &ratios, dose).grand_sum();
    if variance_form <= 0.0 {
        return Err(TestError::DegenerateVariance { dose });
    }
    let numerator = pair_rank_profile(ds, dose).rdiff_sum();
    Ok(numerator / sqrt(ds.total_subjects() as f64 * variance_form))
}

/// Density of max(Z₁, Z₂) for standard normals with correlation ρ:
/// f(u) = 2·φ(u)·Φ(u·√((1−ρ)/(1+ρ))).
pub fn max2_density(u: f64, rho: f64) -> f64 {
    2.0 * phi(u) * norm_cdf(u * sqrt((1.0 - rho) / (1.0 + rho)))
}

/// P(max(Z₁, Z₂) > v) = 1 − Φ₂(v, v; ρ), evaluated through the
/// bivariate-normal CDF.
pub fn max2_pvalue(v: f64, rho: f64) -> f64 {
    let rho = rho.clamp(-RHO_CLAMP, RHO_CLAMP);
    (1.0 - bvn_cdf(v, v, rho)).clamp(0.0, 1.0)
}

/// Same tail probability by adaptive quadrature of [`max2_density`] over
/// [v, ∞). Kept as an independent cross-check of [`max2_pvalue`].
pub fn max2_pvalue_quadrature(v: f64, rho: f64, tol: f64) -> Result<f64, QuadError> {
    let rho = rho.clamp(-RHO_CLAMP, RHO_CLAMP);
    let upper = v.max(0.0) + 12.0;
    if v >= upper {
        return Ok(0.0);
    }
    Ok(quad(|u| max2_density(u, rho), v, upper, tol)?.clamp(0.0, 1.0))
}

/// Two-arm test: one dose arm, p = 1 − Φ(z), one-sided.
pub fn two_arm_lrst(ds: &TrialDataset) -> Result<LrstResult, TestError> {
    if ds.n_dose_arms() != 1 {
        return Err(TestError::WrongArity {
            actual: ds.n_dose_arms(),
        });
    }
    multi_arm_lrst(ds, &LrstOptions::default())
}

/// The multi-arm longitudinal rank-sum test.
///
/// Computes one standardized component per dose arm, the estimated
/// component correlation matrix, the max statistic, and its one-sided
/// p-value: closed-form normal for A = 1, closed-form max-of-two for A = 2,
/// seeded Monte Carlo for A ≥ 3 (or when forced via options).
pub fn multi_arm_lrst(ds: &TrialDataset, opts: &LrstOptions) -> Result<LrstResult, TestError> {
    let a_len = ds.n_dose_arms();
    let blocks = assemble_sigma(ds);
    let n_total = ds.total_subjects() as f64;

    let mut variance_forms = Vec::with_capacity(a_len);
    for a in 0..a_len {
        let v = blocks.within_form(a);
        if v <= 0.0 {
            return Err(TestError::DegenerateVariance { dose: a });
        }
        variance_forms.push(v);
    }

    let components: Vec<f64> = (0..a_len)
        .map(|a| pair_rank_profile(ds, a).rdiff_sum() / sqrt(n_total * variance_forms[a]))
        .collect();

    let mut clamped = false;
    let correlation = CorrelationMatrix::from_fn(a_len, |i, j| {
        let r = blocks.cross_form(i, j) / sqrt(variance_forms[i] * variance_forms[j]);
        if r.abs() > RHO_CLAMP {
            clamped = true;
        }
        r.clamp(-RHO_CLAMP, RHO_CLAMP)
    });

    let statistic = components.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let selected_dose = select_dose(&components);

    let mut diagnostics = Diagnostics {
        correlation_repaired: false,
        correlation_clamped: clamped,
    };

    let (p_value, p_value_method, mc_std_error) = if a_len == 1 && !opts.force_monte_carlo {
        (norm_sf(statistic), PValueMethod::ClosedFormNormal, None)
    } else if a_len == 2 && !opts.force_monte_carlo {
        let rho = correlation.matrix()[(0, 1)];
        (max2_pvalue(statistic, rho), PValueMethod::ClosedFormMax2, None)
    } else {
        let mut sampler_corr = correlation.clone();
        if sampler_corr.cholesky().is_err() {
            diagnostics.correlation_repaired = sampler_corr.repair();
        }
        let (p, se) = mvn_max_tail(&sampler_corr, statistic, opts.mc_draws, opts.seed);
        (p, PValueMethod::MonteCarlo, Some(se))
    };

    let per_pair = (0..a_len).map(|a| theta_hat(ds, a)).collect();

    Ok(LrstResult {
        components,
        statistic,
        statistic_per_visit: statistic / ds.n_visits() as f64,
        correlation: correlation.matrix().clone(),
        p_value,
        p_value_method,
        mc_std_error,
        selected_dose,
        per_pair,
        diagnostics,
    })
}

/// Per-dose univariate tests with a Bonferroni threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct BonferroniResult {
    /// One-sided univariate p-value per dose, from the control+dose
    /// sub-dataset.
    pub per_dose_p: Vec<f64>,
    /// α / A.
    pub threshold: f64,
    /// min p < threshold.
    pub rejected: bool,
}

/// The multiplicity-adjusted univariate comparator: a two-arm test per dose
/// on the control+dose sub-dataset, rejecting when any p < α/A.
pub fn bonferroni_univariate(ds: &TrialDataset, alpha: f64) -> Result<BonferroniResult, TestError> {
    let a_len = ds.n_dose_arms();
    let mut per_dose_p = Vec::with_capacity(a_len);
    for a in 0..a_len {
        let sub = ds.pair_subset(a);
        per_dose_p.push(two_arm_lrst(&sub)?.p_value);
    }
    let threshold = alpha / a_len as f64;
    let rejected = per_dose_p.iter().any(|&p| p < threshold);
    Ok(BonferroniResult {
        per_dose_p,
        threshold,
        rejected,
    })
}
