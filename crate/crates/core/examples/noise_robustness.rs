//! Recovery error as the inliers are perturbed off the subspace.

use subrec::harness::experiments::{noise_sweep, NoiseConfig};
use subrec::EstimatorConfig;

fn main() -> anyhow::Result<()> {
    let rows = noise_sweep(&NoiseConfig {
        ambient_dim: 10,
        subspace_dim: 5,
        n_inliers: 120,
        n_outliers: 100,
        noise_levels: vec![0.0, 1e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1],
        trials: 10,
        seed: 0,
        estimator: EstimatorConfig::default(),
    })?;
    println!("{:>8} {:>12} {:>10}", "epsilon", "mean_error", "error/eps");
    for r in rows {
        let ratio = if r.epsilon > 0.0 {
            r.mean_recovery_error / r.epsilon
        } else {
            f64::NAN
        };
        println!("{:>8.0e} {:>12.3e} {:>10.2}", r.epsilon, r.mean_recovery_error, ratio);
    }
    Ok(())
}
