//! Runs the fixed-point iteration on a small data set with a dominant line.

use subrec::{estimate, recovery_error, top_d_subspace, DataSet, EstimatorConfig, Subspace};

fn main() -> subrec::Result<()> {
    // Three points on the x-axis, two off it. 3/5 > 1/2, so the axis wins.
    let data = DataSet::from_rows(&[[1.0, 0.0], [2.0, 0.0], [-1.0, 0.0], [0.3, 1.0], [-0.2, 1.0]])?;
    let result = estimate(&data, &EstimatorConfig::default())?;

    println!("{:>5} {:>14} {:>12} {:>12}", "k", "objective", "rel_step", "lambda_min");
    for r in &result.trace {
        if r.k <= 5 || r.k % 10 == 0 || r.k == result.iterations {
            println!(
                "{:>5} {:>14.8} {:>12.3e} {:>12.3e}",
                r.k, r.objective, r.rel_step, r.lambda_min
            );
        }
    }
    println!(
        "termination: {} after {} iterations",
        result.termination.as_str(),
        result.iterations
    );
    println!("sigma =\n{}", result.sigma.as_matrix());

    let l = top_d_subspace(result.sigma.as_spd().as_symmetric(), 1)?;
    let err = recovery_error(&l, &Subspace::coordinate(2, 1)?)?;
    println!(
        "recovered line basis: {:?}, error vs x-axis {err:.3e}",
        l.to_row_major()
    );
    Ok(())
}
