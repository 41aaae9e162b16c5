//! Ordered families of real matrices sharing a column count.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// The matrices `A_1, ..., A_k` of a generalized supporting vector problem.
///
/// Every matrix maps `R^n` into some `R^{m_i}`; the row counts may differ
/// but the column count `n` is shared.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorStack {
    mats: Vec<DMatrix<f64>>,
    ncols: usize,
}

impl OperatorStack {
    pub fn new(mats: Vec<DMatrix<f64>>) -> Result<Self> {
        let first = mats.first().ok_or(Error::EmptyStack)?;
        let ncols = first.ncols();
        if ncols == 0 {
            return Err(Error::ShapeMismatch("matrices must have at least one column".into()));
        }
        for (i, m) in mats.iter().enumerate() {
            if m.ncols() != ncols {
                return Err(Error::ShapeMismatch(format!(
                    "matrix {} has {} columns, expected {}",
                    i,
                    m.ncols(),
                    ncols
                )));
            }
            if let Some((row, col)) = first_non_finite(m) {
                return Err(Error::NonFinite { row, col });
            }
        }
        Ok(Self { mats, ncols })
    }

    pub fn single(mat: DMatrix<f64>) -> Result<Self> {
        Self::new(vec![mat])
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.mats
    }

    pub fn is_all_zero(&self) -> bool {
        self.mats.iter().all(|m| m.iter().all(|&v| v == 0.0))
    }

    /// Every matrix multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            mats: self.mats.iter().map(|m| m * t).collect(),
            ncols: self.ncols,
        }
    }

    /// `sum_i ||A_i x||^2`, evaluated from the matrices themselves.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        assert_eq!(x.len(), self.ncols, "vector length must match column count");
        self.mats.iter().map(|m| (m * x).norm_squared()).sum()
    }
}

pub(crate) fn first_non_finite(m: &DMatrix<f64>) -> Option<(usize, usize)> {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if !m[(r, c)].is_finite() {
                return Some((r, c));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_mismatched() {
        assert_eq!(OperatorStack::new(vec![]), Err(Error::EmptyStack));
        let err = OperatorStack::new(vec![DMatrix::identity(2, 2), DMatrix::identity(3, 3)]);
        assert!(matches!(err, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = DMatrix::identity(2, 2);
        m[(1, 0)] = f64::NAN;
        assert_eq!(OperatorStack::single(m), Err(Error::NonFinite { row: 1, col: 0 }));
    }

    #[test]
    fn objective_sums_squared_norms() {
        let s = OperatorStack::new(vec![
            DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0])),
            DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 3.0])),
        ])
        .unwrap();
        assert_eq!(s.objective(&DVector::from_vec(vec![1.0, 0.0])), 4.0);
        assert_eq!(s.objective(&DVector::from_vec(vec![0.0, 1.0])), 10.0);
    }
}
