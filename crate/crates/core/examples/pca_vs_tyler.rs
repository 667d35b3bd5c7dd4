//! Compares the robust estimate with plain PCA on outlier-heavy data.

use subrec::{estimate, generate, pca_subspace, recovery_error, top_d_subspace, EstimatorConfig, SyntheticModel};

fn main() -> subrec::Result<()> {
    println!("{:>4} {:>12} {:>12} {:>12}", "seed", "tyler", "pca", "pca_center");
    for seed in 0..5 {
        let model = SyntheticModel::new(10, 5, 120, 100, 0.0, seed)?;
        let (data, truth) = generate(&model)?;
        let r = estimate(&data, &EstimatorConfig::default())?;
        let tyler = recovery_error(&top_d_subspace(r.sigma.as_spd().as_symmetric(), 5)?, &truth)?;
        let pca = recovery_error(&pca_subspace(&data, 5, false)?, &truth)?;
        let centered = recovery_error(&pca_subspace(&data, 5, true)?, &truth)?;
        println!("{seed:>4} {tyler:>12.3e} {pca:>12.3e} {centered:>12.3e}");
    }
    Ok(())
}
