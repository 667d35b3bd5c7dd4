//! Brute-force checks of the uniqueness and recovery conditions.

use subrec::oracles::{majorization_gap, recovery_condition, uniqueness_condition};
use subrec::{DataSet, SpdMatrix, Subspace};

fn report(name: &str, data: &DataSet) {
    let u = uniqueness_condition(data);
    print!(
        "{name:<18} unique: {:<5} tightest {:.3} vs {:.3}",
        u.holds, u.fraction, u.threshold
    );
    if let Some(w) = &u.witness {
        print!(
            "  witness dim {} holds {}/{}",
            w.subspace.dim(),
            w.member_count,
            w.total
        );
    }
    println!();
}

fn main() -> subrec::Result<()> {
    let basis = DataSet::from_rows(&[[1.0, 0.0], [0.0, 1.0]])?;
    let three = DataSet::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])?;
    let collinear = DataSet::from_rows(&[[1.0, 0.0], [2.0, 0.0], [-1.0, 0.0], [0.3, 1.0], [-0.2, 1.0]])?;
    report("e1, e2", &basis);
    report("three directions", &three);
    report("collinear", &collinear);

    let axis = Subspace::coordinate(2, 1)?;
    let r = recovery_condition(&collinear, &axis);
    println!(
        "recovery on x-axis: {} ({:.2} > {:.2})",
        r.holds, r.fraction, r.threshold
    );

    let s = SpdMatrix::from_diagonal(&[0.7, 0.3])?;
    let anchor = SpdMatrix::from_diagonal(&[0.5, 0.5])?;
    println!(
        "majorization gap: {:.6} (>= 0)",
        majorization_gap(&s, &anchor, &collinear)?
    );
    Ok(())
}
