//! Attractive self-avoiding walks on `Z^d`: exact enumeration of weighted
//! connectivities, lace-expansion kernels, series estimates and Rosenbluth
//! sampling.
//!
//! Every computation is generic over [`Scalar`], with `f64` (compensated
//! sums) and [`Exact`] rationals as backends.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod enumerate;
pub mod error;
pub mod exec;
pub mod field;
pub mod laces;
pub mod model;
pub mod sampler;
pub mod scalar;
pub mod series;

pub use enumerate::{connectivity, connectivity_with, ConnectivitySeries, InequalityReport};
pub use error::Error;
pub use exec::{Budget, Executor, Sequential};
pub use field::LatticeField;
pub use laces::{
    compositions, enumerate_laces, is_compatible, is_connected, lace_of, pi_kernel, pi_kernels, IntervalGraph,
    KernelSeries, Lace,
};
pub use model::{
    build_step_distribution, potential, theorem1_condition, walk_weight, Family, LatticePoint, Model, Potential,
    StepDistribution, Walk,
};
pub use sampler::{sample_walks, sample_walks_with, SampleBatch};
pub use scalar::{Exact, Scalar};
pub use series::{diffusion_constant, e_hat, fourier, mu_estimators, verify_fg_recursion, SeriesEstimates};
