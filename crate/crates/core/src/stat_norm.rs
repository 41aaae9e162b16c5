//! Statistically normalized vectors (zero mean, unit population standard
//! deviation), the Lagrangian critical system of equal-norm quadratic
//! forms, and supporting-vector ranking of standardized data.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::gsv::{gsv_solve, GsvSolution};
use crate::stack::OperatorStack;

/// Absolute tolerance on mean and `std - 1` for standardized status.
pub const STANDARDIZED_TOL: f64 = 1e-12;

/// A real vector with its population mean and standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct StatVector {
    values: Vec<f64>,
    mean: f64,
    std: f64,
}

impl StatVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooShort(0));
        }
        let (mean, std) = population_stats(&values);
        Ok(Self { values, mean, std })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    pub fn is_standardized(&self) -> bool {
        self.values.len() >= 2
            && self.mean.abs() <= STANDARDIZED_TOL
            && (self.std - 1.0).abs() <= STANDARDIZED_TOL
    }
}

/// Mean and population (divisor `m`) standard deviation.
pub fn population_stats(x: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mean = x.iter().sum::<f64>() / m;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
    (mean, var.sqrt())
}

/// `(x - mean) / std` with the population standard deviation.
pub fn standardize(x: &[f64]) -> Result<StatVector> {
    let m = x.len();
    if m < 2 {
        return Err(Error::TooShort(m));
    }
    let (mean, std) = population_stats(x);
    if std.is_nan() || std <= 1e-14 * mean.abs().max(1.0) {
        return Err(Error::ConstantVector { std });
    }
    let values = if m == 2 {
        // the only standardized vectors of length 2 are (1, -1) and (-1, 1)
        let s = if x[0] > x[1] { 1.0 } else { -1.0 };
        vec![s, -s]
    } else {
        x.iter().map(|v| (v - mean) / std).collect()
    };
    StatVector::new(values)
}

/// Membership in the sphere of radius `sqrt m` within `ker(1^T)`:
/// `|sum x_i| <= tol m` and `|sum x_i^2 - m| <= tol m`.
pub fn is_snv(x: &[f64], tol: f64) -> bool {
    let m = x.len();
    if m < 2 {
        return false;
    }
    let m = m as f64;
    let sum: f64 = x.iter().sum();
    let sq: f64 = x.iter().map(|v| v * v).sum();
    sum.abs() <= tol * m && (sq - m).abs() <= tol * m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairIdentities {
    pub dot: f64,
    /// `|x . y| <= m` up to `1e-10 m`.
    pub bound_ok: bool,
    /// `|x . y - (||x + y||^2 - 2m) / 2|`.
    pub formula_gap: f64,
}

pub fn snv_pair_identities(x: &StatVector, y: &StatVector) -> Result<PairIdentities> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if !x.is_standardized() || !y.is_standardized() {
        return Err(Error::NotStandardized);
    }
    let m = x.len() as f64;
    let dot: f64 = x.values.iter().zip(&y.values).map(|(a, b)| a * b).sum();
    let sum_sq: f64 = x.values.iter().zip(&y.values).map(|(a, b)| (a + b) * (a + b)).sum();
    Ok(PairIdentities {
        dot,
        bound_ok: dot.abs() <= m + 1e-10 * m,
        formula_gap: (dot - 0.5 * (sum_sq - 2.0 * m)).abs(),
    })
}

/// The stationarity system of `a + sum_{j != k} c_jk x_j x_k` on the unit
/// sphere: `(2 lambda I + K) x = 0` and `||x||^2 = 1`, where `K` holds the
/// off-diagonal coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSystem {
    coeffs: DMatrix<f64>,
    lambda: f64,
}

impl CriticalSystem {
    /// `coeffs` must be square and exactly symmetric; its diagonal is ignored.
    pub fn new(coeffs: DMatrix<f64>, lambda: f64) -> Result<Self> {
        let n = coeffs.nrows();
        if n == 0 || coeffs.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "coefficients must be square, got {}x{}",
                coeffs.nrows(),
                coeffs.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if coeffs[(i, j)] != coeffs[(j, i)] {
                    let asymmetry = (coeffs[(i, j)] - coeffs[(j, i)]).abs();
                    return Err(Error::NotSymmetric { asymmetry, bound: 0.0 });
                }
            }
        }
        let mut coeffs = coeffs;
        coeffs.fill_diagonal(0.0);
        Ok(Self { coeffs, lambda })
    }

    /// Every off-diagonal coefficient equal to `c`.
    pub fn equal(n: usize, c: f64, lambda: f64) -> Result<Self> {
        Self::new(DMatrix::from_element(n, n, c), lambda)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            coeffs: self.coeffs.clone(),
            lambda,
        }
    }

    /// `2 lambda` on the diagonal, `c_jk` off it.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut m = self.coeffs.clone();
        m.fill_diagonal(2.0 * self.lambda);
        m
    }

    pub fn determinant(&self) -> f64 {
        self.matrix().determinant()
    }

    /// The multipliers `lambda` for which the coefficient matrix is singular,
    /// ascending and with multiplicity: `-mu / 2` for each eigenvalue `mu`
    /// of the off-diagonal part.
    pub fn critical_multipliers(&self) -> Vec<f64> {
        let eig = SymmetricEigen::new(self.coeffs.clone());
        let mut out: Vec<f64> = eig.eigenvalues.iter().map(|mu| -0.5 * mu).collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Orthonormal basis of the kernel of the coefficient matrix; its unit
    /// vectors are the critical points for the current multiplier.
    pub fn critical_points(&self, tol: f64) -> DMatrix<f64> {
        let m = self.matrix();
        let scale = m.amax().max(1.0);
        let eig = SymmetricEigen::new(m);
        let cols: Vec<DVector<f64>> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, mu)| mu.abs() <= tol * scale)
            .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
            .collect();
        if cols.is_empty() {
            DMatrix::zeros(self.dim(), 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }
}

/// Euclidean norm of the stacked residual `[(2 lambda I + K) x ; ||x||^2 - 1]`.
pub fn critical_residual(sys: &CriticalSystem, x: &[f64]) -> Result<f64> {
    if x.len() != sys.dim() {
        return Err(Error::ShapeMismatch(format!(
            "vector has length {}, system has dimension {}",
            x.len(),
            sys.dim()
        )));
    }
    let x = DVector::from_column_slice(x);
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let linear = sys.matrix() * &x;
    let sphere = x.norm_squared() - 1.0;
    Ok((linear.norm_squared() + sphere * sphere).sqrt())
}

/// An `m x n` data matrix with per-column provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct StatMatrix {
    data: DMatrix<f64>,
    col_means: Vec<f64>,
    col_stds: Vec<f64>,
    standardized: bool,
}

impl StatMatrix {
    /// Standardizes every column of raw data. Means and standard deviations
    /// of the raw columns are kept.
    pub fn from_raw(raw: &DMatrix<f64>) -> Result<Self> {
        let (m, n) = raw.shape();
        let mut data = DMatrix::zeros(m, n);
        let mut col_means = Vec::with_capacity(n);
        let mut col_stds = Vec::with_capacity(n);
        for j in 0..n {
            let col: Vec<f64> = raw.column(j).iter().copied().collect();
            let st = standardize(&col).map_err(|e| match e {
                Error::ConstantVector { .. } => Error::ConstantColumn { index: j },
                other => other,
            })?;
            let (mean, std) = population_stats(&col);
            col_means.push(mean);
            col_stds.push(std);
            data.set_column(j, &DVector::from_column_slice(st.values()));
        }
        Ok(Self {
            data,
            col_means,
            col_stds,
            standardized: true,
        })
    }

    /// Wraps data as is, recording whether every column is standardized.
    pub fn from_data(data: DMatrix<f64>) -> Result<Self> {
        let n = data.ncols();
        let mut col_means = Vec::with_capacity(n);
        let mut col_stds = Vec::with_capacity(n);
        let mut standardized = n > 0;
        for j in 0..n {
            let col = StatVector::new(data.column(j).iter().copied().collect())?;
            standardized &= col.is_standardized();
            col_means.push(col.mean());
            col_stds.push(col.std());
        }
        Ok(Self {
            data,
            col_means,
            col_stds,
            standardized,
        })
    }

    /// Like [`StatMatrix::from_data`], but rejects columns that are not standardized.
    pub fn from_standardized(data: DMatrix<f64>) -> Result<Self> {
        let m = Self::from_data(data)?;
        if !m.standardized {
            return Err(Error::NotStandardized);
        }
        Ok(m)
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn col_means(&self) -> &[f64] {
        &self.col_means
    }

    pub fn col_stds(&self) -> &[f64] {
        &self.col_stds
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedRow {
    pub index: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    /// Oriented supporting vector `x` of the data matrix.
    pub weights: DVector<f64>,
    /// `M x`, in original row order.
    pub scores: Vec<f64>,
    /// Rows by descending score, ties by ascending index.
    pub rows: Vec<RankedRow>,
    pub solution: GsvSolution,
}

/// Scores every row by `M x` where `x` maximizes `||M x||` on the unit
/// sphere, oriented so that `sum_j x_j >= 0`.
pub fn rank_by_score(m: &StatMatrix, gap_rtol: f64) -> Result<Ranking> {
    if !m.is_standardized() {
        return Err(Error::NotStandardized);
    }
    let (rows, cols) = m.data.shape();
    if rows <= cols {
        return Err(Error::ShapeMismatch(format!(
            "ranking needs more rows than columns, got {rows}x{cols}"
        )));
    }
    let solution = gsv_solve(&OperatorStack::single(m.data.clone())?, gap_rtol)?;
    let mut weights = solution.first_vector();
    if weights.sum() < 0.0 {
        weights.neg_mut();
    }
    let scores: Vec<f64> = (&m.data * &weights).iter().copied().collect();
    let mut ranked: Vec<RankedRow> = scores
        .iter()
        .enumerate()
        .map(|(index, &score)| RankedRow { index, score })
        .collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
    Ok(Ranking {
        weights,
        scores,
        rows: ranked,
        solution,
    })
}
