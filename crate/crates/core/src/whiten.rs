//! Upper Cholesky factor `R = C^T C` and the triangular solves that apply `C^{-1}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::stack::first_non_finite;

const SYMMETRY_RTOL: f64 = 1e-10;

/// Upper-triangular `C` with positive diagonal and `C^T C = R`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperCholesky {
    factor: DMatrix<f64>,
}

impl UpperCholesky {
    /// Factors a symmetric positive definite `r`.
    ///
    /// Fails with [`Error::NotSpd`] at the first non-positive pivot
    /// (0-based). No regularization is attempted.
    pub fn factor(r: &DMatrix<f64>) -> Result<Self> {
        let n = r.nrows();
        if n == 0 || r.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "resistance must be square and non-empty, got {}x{}",
                r.nrows(),
                r.ncols()
            )));
        }
        if let Some((row, col)) = first_non_finite(r) {
            return Err(Error::NonFinite { row, col });
        }
        let asymmetry = (r - r.transpose()).norm();
        let bound = SYMMETRY_RTOL * r.norm();
        if asymmetry > bound {
            return Err(Error::NotSymmetric { asymmetry, bound });
        }

        let mut c = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let mut pivot = r[(j, j)];
            for k in 0..j {
                pivot -= c[(k, j)] * c[(k, j)];
            }
            if pivot.is_nan() || pivot <= 0.0 {
                return Err(Error::NotSpd { pivot: j, value: pivot });
            }
            let d = pivot.sqrt();
            c[(j, j)] = d;
            for i in (j + 1)..n {
                let mut s = r[(j, i)];
                for k in 0..j {
                    s -= c[(k, j)] * c[(k, i)];
                }
                c[(j, i)] = s / d;
            }
        }
        Ok(Self { factor: c })
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn upper(&self) -> &DMatrix<f64> {
        &self.factor
    }

    /// `C^{-1} x` by back substitution.
    pub fn solve(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let c = &self.factor;
        let mut out = x.clone();
        for i in (0..n).rev() {
            let mut s = out[i];
            for k in (i + 1)..n {
                s -= c[(i, k)] * out[k];
            }
            out[i] = s / c[(i, i)];
        }
        out
    }

    /// `E C^{-1}`, computed row by row as the solution of `C^T y = e`.
    pub fn right_apply_inverse(&self, e: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim();
        assert_eq!(e.ncols(), n);
        let c = &self.factor;
        let mut out = e.clone();
        for row in 0..e.nrows() {
            for i in 0..n {
                let mut s = out[(row, i)];
                for k in 0..i {
                    s -= c[(k, i)] * out[(row, k)];
                }
                out[(row, i)] = s / c[(i, i)];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_known_matrix() {
        // [4 2; 2 3] = [2 1; 0 sqrt 2]^T [2 1; 0 sqrt 2]
        let r = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 3.0]);
        let c = UpperCholesky::factor(&r).unwrap();
        assert_eq!(c.upper()[(0, 0)], 2.0);
        assert_eq!(c.upper()[(0, 1)], 1.0);
        assert_eq!(c.upper()[(1, 0)], 0.0);
        assert!((c.upper()[(1, 1)] - 2f64.sqrt()).abs() < 1e-15);
        assert!((c.upper().tr_mul(c.upper()) - r).amax() < 1e-14);
    }

    #[test]
    fn identity_and_scaled_identity_are_exact() {
        let c = UpperCholesky::factor(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(c.upper(), &DMatrix::identity(3, 3));
        let c = UpperCholesky::factor(&(DMatrix::identity(3, 3) * 4.0)).unwrap();
        assert_eq!(c.upper(), &(DMatrix::identity(3, 3) * 2.0));
    }

    #[test]
    fn reports_failing_pivot() {
        let r = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 0.0, 2.0, 1.0]);
        match UpperCholesky::factor(&r) {
            Err(Error::NotSpd { pivot, value }) => {
                assert_eq!(pivot, 2);
                assert_eq!(value, -3.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        let r = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(UpperCholesky::factor(&r), Err(Error::NotSpd { pivot: 0, .. })));
    }

    #[test]
    fn solves_match_products() {
        let r = DMatrix::from_row_slice(3, 3, &[5.0, 1.0, 0.5, 1.0, 4.0, 1.0, 0.5, 1.0, 3.0]);
        let c = UpperCholesky::factor(&r).unwrap();
        let x = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let y = c.solve(&x);
        assert!((c.upper() * y - &x).amax() < 1e-14);

        let e = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, -1.0, 0.0, 4.0]);
        let a = c.right_apply_inverse(&e);
        assert!((a * c.upper() - e).amax() < 1e-14);
    }
}
