//! Affine-invariant geometry on the cone of symmetric positive-definite matrices.
//!
//! Every matrix function here (square root, inverse square root, real powers and
//! the logarithm) goes through a symmetric eigendecomposition: eigensolve, map the
//! eigenvalues, recompose. For SPD inputs at the sizes this crate targets that is
//! unconditionally stable.
//!
//! ```text
//! dist(S1, S2) = || log(S1^{-1/2} S2 S1^{-1/2}) ||_F
//! gamma(t)     = S1^{1/2} (S1^{-1/2} S2 S1^{-1/2})^t S1^{1/2}
//! mean(S1, S2) = gamma(1/2)
//! ```

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative asymmetry absorbed by averaging on construction.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// A matrix counts as numerically SPD when `lambda_min > SPD_THRESHOLD * lambda_max`.
pub const SPD_THRESHOLD: f64 = 1e-14;

/// Square real matrix stored with exact symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Validates `m` and averages away floating-point asymmetry.
    ///
    /// Matrices whose relative asymmetry `||A - A^T||_F / ||A||_F` exceeds
    /// [`SYMMETRY_TOLERANCE`] are rejected.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square(&m)?;
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = m.norm();
        let skew = (&m - m.transpose()).norm();
        let asymmetry = if norm > 0.0 { skew / norm } else { 0.0 };
        if asymmetry > SYMMETRY_TOLERANCE {
            return Err(Error::Asymmetric { asymmetry });
        }
        Ok(Self::symmetrized(m))
    }

    /// Averages `(m + m^T) / 2` without a tolerance check. For results of
    /// computations that are symmetric in exact arithmetic.
    pub(crate) fn symmetrized(m: DMatrix<f64>) -> Self {
        let t = m.transpose();
        Self { inner: (m + t) * 0.5 }
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::EmptyData);
        }
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { inner: &self.inner * c }
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.inner.transpose().iter().copied().collect()
    }

    pub fn eigen(&self) -> Eigen {
        sym_eigendecompose(self)
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigen {
    /// `V f(diag(lambda)) V^T`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymmetricMatrix {
        let mapped = self.values.map(f);
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, j| {
            self.vectors[(i, j)] * mapped[j]
        });
        SymmetricMatrix::symmetrized(scaled * self.vectors.transpose())
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.map(|v| v)
    }

    pub fn lambda_max(&self) -> f64 {
        self.values[0]
    }

    pub fn lambda_min(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// Symmetric eigendecomposition, eigenvalues sorted descending.
///
/// Under ties the eigenvectors inside a degenerate eigenspace are an arbitrary
/// orthonormal completion; only the reconstruction is meaningful.
pub fn sym_eigendecompose(a: &SymmetricMatrix) -> Eigen {
    let eig = a.inner.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(a.dim(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Eigen { values, vectors }
}

/// Symmetric positive-definite matrix with its eigendecomposition cached.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    sym: SymmetricMatrix,
    eigen: Eigen,
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.sym == other.sym
    }
}

impl SpdMatrix {
    /// Fails unless `lambda_min > SPD_THRESHOLD * lambda_max` and `lambda_min > 0`.
    pub fn new(sym: SymmetricMatrix) -> Result<Self> {
        let eigen = sym_eigendecompose(&sym);
        let (lambda_min, lambda_max) = (eigen.lambda_min(), eigen.lambda_max());
        if !(lambda_min > 0.0 && lambda_min > SPD_THRESHOLD * lambda_max) {
            return Err(Error::NotPositiveDefinite { lambda_min, lambda_max });
        }
        Ok(Self { sym, eigen })
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        Self::new(SymmetricMatrix::new(m)?)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(SymmetricMatrix::from_diagonal(diag)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(SymmetricMatrix::identity(dim)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    pub fn as_symmetric(&self) -> &SymmetricMatrix {
        &self.sym
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        self.sym.as_matrix()
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eigen
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigen.lambda_min()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigen.lambda_max()
    }

    pub fn trace(&self) -> f64 {
        self.sym.trace()
    }

    pub fn log_det(&self) -> f64 {
        self.eigen.values.iter().map(|v| v.ln()).sum()
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive and finite, got {c}"
            )));
        }
        let mut eigen = self.eigen.clone();
        eigen.values *= c;
        Ok(Self {
            sym: self.sym.scale(c),
            eigen,
        })
    }

    /// `S^t` for real `t`.
    pub fn power(&self, t: f64) -> SymmetricMatrix {
        self.eigen.map(|v| v.powf(t))
    }

    pub fn inverse(&self) -> SymmetricMatrix {
        self.eigen.map(|v| 1.0 / v)
    }

    pub fn log(&self) -> SymmetricMatrix {
        self.eigen.map(f64::ln)
    }
}

/// Principal square root.
pub fn spd_sqrt(s: &SpdMatrix) -> Result<SpdMatrix> {
    SpdMatrix::new(s.eigen.map(f64::sqrt))
}

fn check_same_dim(a: &SpdMatrix, b: &SpdMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(())
}

/// `S1^{-1/2} S2 S1^{-1/2}`, symmetrized.
fn whitened(s1: &SpdMatrix, s2: &SpdMatrix) -> SymmetricMatrix {
    let w = s1.power(-0.5).into_matrix();
    SymmetricMatrix::symmetrized(&w * s2.as_matrix() * &w)
}

/// Affine-invariant Riemannian distance.
pub fn spd_distance(s1: &SpdMatrix, s2: &SpdMatrix) -> Result<f64> {
    check_same_dim(s1, s2)?;
    let eig = sym_eigendecompose(&whitened(s1, s2));
    if eig.lambda_min() <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            lambda_min: eig.lambda_min(),
            lambda_max: eig.lambda_max(),
        });
    }
    Ok(eig.values.iter().map(|v| v.ln().powi(2)).sum::<f64>().sqrt())
}

/// Point at parameter `t` on the geodesic from `s1` (t = 0) to `s2` (t = 1).
pub fn geodesic(s1: &SpdMatrix, s2: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    check_same_dim(s1, s2)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "geodesic parameter must lie in [0, 1], got {t}"
        )));
    }
    let middle = SpdMatrix::new(whitened(s1, s2))?;
    let root = s1.power(0.5).into_matrix();
    let inner = middle.power(t).into_matrix();
    SpdMatrix::new(SymmetricMatrix::symmetrized(&root * inner * &root))
}

/// Geodesic midpoint.
pub fn geometric_mean(s1: &SpdMatrix, s2: &SpdMatrix) -> Result<SpdMatrix> {
    geodesic(s1, s2, 0.5)
}
