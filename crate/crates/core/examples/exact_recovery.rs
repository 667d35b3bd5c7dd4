//! Sweeps the inlier count across the d/D threshold.
//!
//! With D = 10, d = 5 and 100 outliers the threshold sits at 100 inliers.

use subrec::harness::experiments::{exact_recovery, ExactRecoveryConfig};
use subrec::EstimatorConfig;

fn main() -> anyhow::Result<()> {
    let rows = exact_recovery(&ExactRecoveryConfig {
        ambient_dim: 10,
        subspace_dim: 5,
        n_outliers: 100,
        n_inliers: (80..=120).step_by(5).collect(),
        trials: 10,
        seed: 0,
        estimator: EstimatorConfig::default(),
    })?;
    println!("{:>9} {:>12} {:>10}", "n_inliers", "mean_error", "std");
    for r in rows {
        println!("{:>9} {:>12.3e} {:>10.2e}", r.n_inliers, r.mean_recovery_error, r.std);
    }
    Ok(())
}
