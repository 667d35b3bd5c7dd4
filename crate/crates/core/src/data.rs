use nalgebra::{DMatrix, DVector, DVectorView};

use crate::error::{Error, Result};

/// A finite point cloud in `R^D` with no zero points.
///
/// Points are stored as the columns of a `D x N` matrix so each point is
/// contiguous in memory. Duplicates are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    points: DMatrix<f64>,
}

impl DataSet {
    /// Builds a data set from a `D x N` matrix whose columns are the points.
    pub fn from_columns(points: DMatrix<f64>) -> Result<Self> {
        if points.ncols() == 0 || points.nrows() == 0 {
            return Err(Error::EmptyData);
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(index) = points.column_iter().position(|c| c.iter().all(|&v| v == 0.0)) {
            return Err(Error::ZeroPoint { index });
        }
        Ok(Self { points })
    }

    /// One slice per point; all must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyData)?.as_ref().len();
        let mut points = DMatrix::zeros(first, rows.len());
        for (j, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != first {
                return Err(Error::DimensionMismatch {
                    expected: first,
                    actual: row.len(),
                });
            }
            points.column_mut(j).copy_from_slice(row);
        }
        Self::from_columns(points)
    }

    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.ncols() == 0
    }

    pub fn point(&self, i: usize) -> DVectorView<'_, f64> {
        self.points.column(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = DVectorView<'_, f64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// The `D x N` matrix of points.
    pub fn as_columns(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(|p| p.iter().copied().collect()).collect()
    }

    /// Subset in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let cols: Vec<DVector<f64>> = indices.iter().map(|&i| self.point(i).into_owned()).collect();
        if cols.is_empty() {
            return Err(Error::EmptyData);
        }
        Self::from_columns(DMatrix::from_columns(&cols))
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: self.dim(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_point_and_empty() {
        let err = DataSet::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap_err();
        assert_eq!(err, Error::ZeroPoint { index: 1 });
        let empty: Vec<Vec<f64>> = vec![];
        assert_eq!(DataSet::from_rows(&empty).unwrap_err(), Error::EmptyData);
    }

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(matches!(
            DataSet::from_rows(&[vec![1.0, 0.0], vec![1.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            DataSet::from_rows(&[vec![1.0, f64::INFINITY]]).unwrap_err(),
            Error::NonFinite
        );
    }

    #[test]
    fn rows_round_trip_and_duplicates_allowed() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 0.0]];
        let data = DataSet::from_rows(&rows).unwrap();
        assert_eq!(data.dim(), 3);
        assert_eq!(data.len(), 3);
        assert_eq!(data.to_rows(), rows);
        assert_eq!(data.point(2)[1], 0.5);
    }
}
