//! Linear subspaces, projectors and the recovery metrics built on them.

use nalgebra::{DMatrix, DVector};

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::spd::{sym_eigendecompose, SymmetricMatrix};

/// Columns within this distance of orthonormal are re-orthonormalized on construction.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-8;

/// Eigenvalue gap (relative to the largest eigenvalue) below which the top-d
/// eigenspace is reported as ambiguous.
pub const GAP_TOLERANCE: f64 = 1e-12;

/// A `d`-dimensional linear subspace of `R^D` held as an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Accepts a `D x d` basis whose columns are orthonormal to within
    /// [`ORTHONORMAL_TOLERANCE`]; the stored basis is re-orthonormalized by QR.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let (ambient, dim) = basis.shape();
        if dim == 0 || dim > ambient {
            return Err(Error::InvalidParameter(format!(
                "subspace dimension {dim} must lie in 1..={ambient}"
            )));
        }
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let deviation = (basis.transpose() * &basis - DMatrix::identity(dim, dim)).amax();
        if deviation > ORTHONORMAL_TOLERANCE {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self {
            basis: orthonormalize(basis),
        })
    }

    /// Span of the first `dim` coordinate axes.
    pub fn coordinate(ambient_dim: usize, dim: usize) -> Result<Self> {
        if dim == 0 || dim > ambient_dim {
            return Err(Error::InvalidParameter(format!(
                "subspace dimension {dim} must lie in 1..={ambient_dim}"
            )));
        }
        Ok(Self {
            basis: DMatrix::identity(ambient_dim, dim),
        })
    }

    /// Orthonormal basis of the column span of `vectors`, or `None` if they
    /// are all numerically zero. Rank uses singular values above
    /// `rel_tol * sigma_max`.
    pub fn span_of(vectors: &DMatrix<f64>, rel_tol: f64) -> Option<Self> {
        let svd = vectors.clone().svd(true, false);
        let u = svd.u?;
        let smax = svd.singular_values.max();
        if !(smax > 0.0) {
            return None;
        }
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > rel_tol * smax)
            .collect();
        let cols: Vec<DVector<f64>> = keep.iter().map(|&i| u.column(i).into_owned()).collect();
        Some(Self {
            basis: orthonormalize(DMatrix::from_columns(&cols)),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The `D x d` matrix `P_L`.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// `Pi_L = P_L P_L^T`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Orthogonal complement, `None` when `d == D`.
    pub fn complement(&self) -> Option<Self> {
        let (ambient, dim) = self.basis.shape();
        if dim == ambient {
            return None;
        }
        let residual = DMatrix::identity(ambient, ambient) - self.projector();
        let eig = sym_eigendecompose(&SymmetricMatrix::symmetrized(residual));
        Some(Self {
            basis: orthonormalize(eig.vectors.columns(0, ambient - dim).into_owned()),
        })
    }

    /// Coordinates `P_L^T x` of `x` in the basis.
    pub fn coordinates(&self, x: &DVector<f64>) -> DVector<f64> {
        self.basis.tr_mul(x)
    }

    /// Returns the basis with its columns rotated by `rotation` (`d x d` orthogonal).
    pub fn rotated(&self, rotation: &DMatrix<f64>) -> Result<Self> {
        Self::new(&self.basis * rotation)
    }

    /// Row-major copy of the basis.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.basis.transpose().iter().copied().collect()
    }

    pub fn from_row_major(ambient_dim: usize, dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != ambient_dim * dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim * dim,
                actual: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(ambient_dim, dim, entries))
    }

    fn check_ambient(&self, other: usize) -> Result<()> {
        if self.ambient_dim() != other {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                actual: other,
            });
        }
        Ok(())
    }
}

/// QR with the signs fixed so that `diag(R) > 0`.
fn orthonormalize(basis: DMatrix<f64>) -> DMatrix<f64> {
    let qr = basis.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Top-d eigenspace together with the spectral gap that separates it.
#[derive(Debug, Clone)]
pub struct TopSubspace {
    pub subspace: Subspace,
    /// `lambda_d - lambda_{d+1}`, or `lambda_d` when `d == D`.
    pub gap: f64,
    pub ambiguous: bool,
}

/// Top-d eigenspace without failing on a vanishing gap.
pub fn top_d_subspace_with_gap(sigma: &SymmetricMatrix, d: usize) -> Result<TopSubspace> {
    let dim = sigma.dim();
    if d == 0 || d > dim {
        return Err(Error::InvalidParameter(format!("d = {d} must lie in 1..={dim}")));
    }
    let eig = sym_eigendecompose(sigma);
    let gap = if d < dim {
        eig.values[d - 1] - eig.values[d]
    } else {
        eig.values[d - 1]
    };
    let scale = eig.values.amax().max(f64::MIN_POSITIVE);
    let ambiguous = d < dim && gap <= GAP_TOLERANCE * scale;
    let subspace = Subspace {
        basis: orthonormalize(eig.vectors.columns(0, d).into_owned()),
    };
    Ok(TopSubspace {
        subspace,
        gap,
        ambiguous,
    })
}

/// Span of the eigenvectors of the `d` largest eigenvalues.
///
/// Fails with [`Error::AmbiguousSubspace`] when eigenvalues `d` and `d + 1`
/// coincide.
pub fn top_d_subspace(sigma: &SymmetricMatrix, d: usize) -> Result<Subspace> {
    let top = top_d_subspace_with_gap(sigma, d)?;
    if top.ambiguous {
        return Err(Error::AmbiguousSubspace { d, gap: top.gap });
    }
    Ok(top.subspace)
}

/// `|| Pi_{L1} - Pi_{L2} ||_F`.
pub fn recovery_error(l1: &Subspace, l2: &Subspace) -> Result<f64> {
    l1.check_ambient(l2.ambient_dim())?;
    Ok((l1.projector() - l2.projector()).norm())
}

/// Top-d eigenspace of the (optionally mean-centered) second-moment matrix.
///
/// A vanishing gap at `d` is not an error here; the eigensolver's choice within
/// the degenerate eigenspace is returned.
pub fn pca_subspace(data: &DataSet, d: usize, center: bool) -> Result<Subspace> {
    let x = data.as_columns();
    let n = data.len() as f64;
    let centered = if center {
        let mean = x.column_mean();
        let mut c = x.clone();
        for mut col in c.column_iter_mut() {
            col -= &mean;
        }
        c
    } else {
        x.clone()
    };
    let moment = &centered * centered.transpose() / n;
    Ok(top_d_subspace_with_gap(&SymmetricMatrix::symmetrized(moment), d)?.subspace)
}

/// `|| x - Pi_L x ||`.
pub fn distance_to_subspace(x: &DVector<f64>, l: &Subspace) -> Result<f64> {
    l.check_ambient(x.len())?;
    let inside = &l.basis * l.basis.tr_mul(x);
    Ok((x - inside).norm())
}
