//! Dense symmetric substrate: Gram sums, the maximal eigenpair with merged
//! multiplicity, and Rayleigh quotients.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::stack::{first_non_finite, OperatorStack};

pub const DEFAULT_GAP_RTOL: f64 = 1e-10;

/// Residual tolerance for a returned eigenpair, relative to `max(1, |value|)`.
pub const RESIDUAL_RTOL: f64 = 1e-8;

/// Asymmetry (Frobenius, relative) tolerated before symmetrization.
const SYMMETRY_RTOL: f64 = 1e-8;

const MAX_EIGEN_ITERATIONS: usize = 100_000;

/// A real symmetric matrix. Entries are exactly symmetric after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    entries: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Symmetrizes `m` as `(m + m^T) / 2`.
    ///
    /// Asymmetry below `1e-8 * ||m||_F` is treated as round-off; anything
    /// larger is rejected.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::ShapeMismatch("matrix must have dimension >= 1".into()));
        }
        if let Some((row, col)) = first_non_finite(&m) {
            return Err(Error::NonFinite { row, col });
        }
        let transpose = m.transpose();
        let asymmetry = (&m - &transpose).norm();
        let bound = SYMMETRY_RTOL * m.norm();
        if asymmetry > bound {
            return Err(Error::NotSymmetric { asymmetry, bound });
        }
        let entries = (m + transpose) * 0.5;
        Ok(Self { entries })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = decompose(&self.entries)?;
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }
}

/// Largest eigenvalue of a symmetric matrix together with an orthonormal
/// basis of its (tolerance-merged) eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// `n x r` with orthonormal columns, `r` the merged multiplicity.
    pub vectors: DMatrix<f64>,
    /// `max_j ||S v_j - value * v_j||_2` over the returned columns.
    pub residual: f64,
    rtol: f64,
}

impl EigenPair {
    pub fn multiplicity(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn residual_rtol(&self) -> f64 {
        self.rtol
    }
}

/// `S = sum_i A_i^T A_i`, accumulated in stack order and symmetrized.
pub fn gram_sum(stack: &OperatorStack) -> Result<SymmetricMatrix> {
    if stack.is_all_zero() {
        return Err(Error::AllZero);
    }
    let n = stack.ncols();
    let mut sum = DMatrix::<f64>::zeros(n, n);
    for a in stack.matrices() {
        sum += a.tr_mul(a);
    }
    SymmetricMatrix::new(sum)
}

/// The largest eigenvalue of `s` and an orthonormal basis for every
/// eigenvector whose eigenvalue lies within `gap_rtol * max(1, lambda_max)`
/// of it.
///
/// Columns are ordered by decreasing eigenvalue and sign-normalized with
/// [`normalize_sign`].
pub fn max_eigenpair(s: &SymmetricMatrix, gap_rtol: f64) -> Result<EigenPair> {
    if !(gap_rtol > 0.0 && gap_rtol < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "gap_rtol must lie in (0, 1), got {gap_rtol}"
        )));
    }
    let eig = decompose(s.as_matrix())?;
    let values = &eig.eigenvalues;
    let lambda_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = gap_rtol * lambda_max.abs().max(1.0);

    let mut selected: Vec<usize> = (0..values.len())
        .filter(|&i| (values[i] - lambda_max).abs() <= tol)
        .collect();
    selected.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let n = s.dim();
    let mut vectors = DMatrix::<f64>::zeros(n, selected.len());
    for (j, &i) in selected.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        v.normalize_mut();
        normalize_sign(&mut v);
        vectors.set_column(j, &v);
    }

    let residual = eigen_residual(s.as_matrix(), lambda_max, &vectors);
    let rtol = RESIDUAL_RTOL.max(gap_rtol);
    let bound = rtol * lambda_max.abs().max(1.0);
    if residual.is_nan() || residual > bound {
        return Err(Error::InaccurateEigenpair { residual, bound });
    }
    Ok(EigenPair {
        value: lambda_max,
        vectors,
        residual,
        rtol,
    })
}

/// `x^T S x / x^T x`.
pub fn rayleigh_quotient(s: &SymmetricMatrix, x: &DVector<f64>) -> Result<f64> {
    if x.len() != s.dim() {
        return Err(Error::LengthMismatch(x.len(), s.dim()));
    }
    let denom = x.norm_squared();
    if denom == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(x.dot(&(s.as_matrix() * x)) / denom)
}

/// Flips `v` so that its first component of largest magnitude is positive.
pub fn normalize_sign(v: &mut DVector<f64>) {
    let mut pivot = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[pivot].abs() {
            pivot = i;
        }
    }
    if !v.is_empty() && v[pivot] < 0.0 {
        v.neg_mut();
    }
}

/// `max_j ||S v_j - lambda v_j||_2`.
pub fn eigen_residual(s: &DMatrix<f64>, lambda: f64, vectors: &DMatrix<f64>) -> f64 {
    vectors
        .column_iter()
        .map(|v| (s * v - v * lambda).norm())
        .fold(0.0, f64::max)
}

fn decompose(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_EIGEN_ITERATIONS).ok_or(
        Error::ConvergenceFailure {
            iterations: MAX_EIGEN_ITERATIONS,
        },
    )
}
