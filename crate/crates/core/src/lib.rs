//! Tyler's M-estimator of scatter applied to robust subspace recovery.
//!
//! The crate is organized around the pieces needed to run and check the
//! estimator:
//!
//! - [`spd`]: affine-invariant geometry on positive-definite matrices.
//! - [`tyler`]: the objective, the fixed-point map and the full iteration.
//! - [`subspace`]: subspaces, projectors, recovery error and a PCA baseline.
//! - [`synth`]: the inlier/outlier generative model used in experiments.
//! - [`oracles`]: brute-force checks of the recovery and uniqueness conditions.
//! - [`harness`]: file formats and experiment drivers behind the `subrec` binary.

pub mod data;
pub mod error;
pub mod harness;
pub mod oracles;
pub mod spd;
pub mod subspace;
pub mod synth;
pub mod tyler;

pub use data::DataSet;
pub use error::{Error, Result};
pub use oracles::{majorization_gap, recovery_condition, uniqueness_condition, ConditionReport};
pub use spd::{geodesic, geometric_mean, spd_distance, spd_sqrt, sym_eigendecompose, SpdMatrix, SymmetricMatrix};
pub use subspace::{distance_to_subspace, pca_subspace, recovery_error, top_d_subspace, Subspace};
pub use synth::{general_position_check, generate, spherical_projection, SyntheticModel};
pub use tyler::{
    breakdown_detected, estimate, estimate_with_observer, fixed_point_residual, fixed_point_step, objective,
    EstimateResult, EstimatorConfig, IterationRecord, Termination, TraceOneSpd,
};
