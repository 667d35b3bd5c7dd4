//! Draws inliers on a subspace plus uniform outliers, and checks general position.

use subrec::harness::formats::data_to_csv;
use subrec::{general_position_check, generate, SyntheticModel};

fn main() -> subrec::Result<()> {
    let model = SyntheticModel::new(10, 5, 120, 100, 0.0, 42)?.with_random_rotation();
    let (data, truth) = generate(&model)?;
    println!(
        "{} points in R^{}, inlier fraction {:.3} vs d/D = {:.3}",
        data.len(),
        data.dim(),
        model.inlier_fraction(),
        5.0 / 10.0
    );

    let worst = (0..model.n_inliers)
        .map(|i| subrec::distance_to_subspace(&data.point(i).into_owned(), &truth).unwrap())
        .fold(0.0, f64::max);
    println!("largest inlier residual: {worst:.2e}");

    let gp = general_position_check(&data, &truth);
    println!(
        "general position: {} ({})",
        gp.holds,
        if gp.is_probabilistic() { "sampled" } else { "exhaustive" }
    );

    let csv = data_to_csv(&data);
    for line in csv.lines().take(3) {
        println!("{line}");
    }
    Ok(())
}
