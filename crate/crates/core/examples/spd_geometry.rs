//! Affine-invariant geometry on positive-definite matrices.

use subrec::{geodesic, geometric_mean, spd_distance, SpdMatrix};

fn main() -> subrec::Result<()> {
    let a = SpdMatrix::from_diagonal(&[1.0, 1.0])?;
    let b = SpdMatrix::from_diagonal(&[4.0, 1.0])?;

    println!("dist(A, B)        = {:.12}", spd_distance(&a, &b)?);
    println!("log 4             = {:.12}", 4f64.ln());

    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let g = geodesic(&a, &b, t)?;
        println!(
            "gamma({t:.2})       = diag({:.6}, {:.6})",
            g.as_matrix()[(0, 0)],
            g.as_matrix()[(1, 1)]
        );
    }

    let c = SpdMatrix::from_matrix(nalgebra::dmatrix![2.0, 0.5; 0.5, 1.0])?;
    let m = geometric_mean(&a, &c)?;
    println!("mean(A, C)        =\n{}", m.as_matrix());
    // det(mean)^2 = det A det C
    println!("2 logdet(mean)    = {:.12}", 2.0 * m.log_det());
    println!("logdet A + logdet C = {:.12}", a.log_det() + c.log_det());
    Ok(())
}
