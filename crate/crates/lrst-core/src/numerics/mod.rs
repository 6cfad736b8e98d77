//! Scalar and matrix numerical kernels: normal pdf/cdf, bivariate normal
//! CDF, adaptive quadrature, Cholesky with eigenvalue-floor repair, and the
//! seeded multivariate-normal max-tail sampler.

pub mod bvn;
pub mod linalg;
pub mod mvn;
pub mod normal;
pub mod quad;
pub mod rng;

pub use bvn::bvn_cdf;
pub use linalg::{cholesky, sym_eigen, CorrelationMatrix, LinalgError, Matrix, EIGENVALUE_FLOOR};
pub use mvn::mvn_max_tail;
pub use normal::{norm_cdf, norm_sf, phi};
pub use quad::{quad, QuadError};
pub use rng::{derive_seed, CounterRng};
