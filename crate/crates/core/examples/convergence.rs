//! Shows the linear convergence rate of the iteration on noisy data.

use subrec::harness::experiments::{convergence, ConvergenceConfig};
use subrec::EstimatorConfig;

fn main() -> anyhow::Result<()> {
    let run = convergence(&ConvergenceConfig {
        ambient_dim: 10,
        subspace_dim: 5,
        n_inliers: 120,
        n_outliers: 100,
        noise: 0.01,
        seed: 0,
        estimator: EstimatorConfig::default(),
    })?;
    println!("{:>4} {:>14} {:>12}", "k", "|S_k - S_K|", "error_k");
    for r in run.rows.iter().step_by(10) {
        println!(
            "{:>4} {:>14.3e} {:>12.3e}",
            r.k, r.sigma_diff_to_final, r.recovery_error
        );
    }

    // Contraction factor per step, from the middle of the run.
    let n = run.rows.len();
    let (a, b) = (&run.rows[n / 5], &run.rows[4 * n / 5]);
    let rate = (b.sigma_diff_to_final / a.sigma_diff_to_final).powf(1.0 / (b.k - a.k) as f64);
    println!(
        "{} iterations ({}), contraction ~{rate:.4} per step",
        n,
        run.termination.as_str()
    );
    Ok(())
}
