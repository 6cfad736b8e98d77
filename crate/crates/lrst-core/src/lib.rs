//! Multi-arm longitudinal rank-sum test.
//!
//! Compares one or more dose arms against a shared control on several
//! longitudinal outcomes at once, using pairwise mid-ranks per visit and
//! outcome. Each dose gets a standardized rank-difference component; the
//! global statistic is the maximum component and the one-sided p-value comes
//! from the joint normal limit of the components (closed form for one or two
//! doses, seeded Monte Carlo beyond that). Rejection is followed by dose
//! selection via the largest component.
//!
//! The crate is `no_std` + `alloc`; all floating-point transcendentals go
//! through `libm`, and the Monte-Carlo sampler uses a counter-based generator
//! so every result is bit-reproducible for a fixed seed.
//!
//! Pipeline: [`dataset::TrialDataset`] → [`ranks`] → [`estimators`] →
//! [`lrst::multi_arm_lrst`].

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dataset;
pub mod estimators;
pub mod lrst;
pub mod numerics;
pub mod ranks;

pub use dataset::{harmonize_directions, Arm, DatasetError, Direction, OutcomeSpec, SampleRatios, TrialDataset};
pub use estimators::{
    assemble_sigma, c_cross_hat, c_hat, cov_terms, d_hat, sigma_cross, sigma_within, theta_hat,
    CovArray, CovTerms, PairwiseEffects, SigmaBlocks,
};
pub use lrst::{
    bonferroni_univariate, component_zscore, max2_density, max2_pvalue, max2_pvalue_quadrature,
    multi_arm_lrst, select_dose, two_arm_lrst, BonferroniResult, Diagnostics, LrstOptions,
    LrstResult, PValueMethod, TestError,
};
pub use numerics::linalg::{CorrelationMatrix, Matrix};
pub use ranks::{midranks, pair_rank_profile, PairRankProfile, RankError};
