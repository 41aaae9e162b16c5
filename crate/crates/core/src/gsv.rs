//! Generalized supporting vectors: unit vectors maximizing `sum_i ||A_i x||^2`.
//!
//! The maximum equals the largest eigenvalue of the Gram sum
//! `sum_i A_i^T A_i`, and the maximizers are exactly the unit vectors of the
//! corresponding eigenspace. [`gsv_solve`] computes both; the other entry
//! points are the closed-form two-column case, the Cholesky-whitened
//! weighted problem, and a sampling oracle that never touches the Gram sum.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spectra::{eigen_residual, gram_sum, max_eigenpair, normalize_sign};
use crate::stack::OperatorStack;
use crate::whiten::UpperCholesky;

/// Largest dimension accepted by [`brute_force_max`].
pub const ORACLE_MAX_DIM: usize = 10;

/// Relative threshold under which `a1 . a2` counts as zero in
/// [`gsv_solve_2col_equalnorm`].
pub const DOT_ZERO_RTOL: f64 = 1e-12;

/// Relative tolerance on `| ||a1|| - ||a2|| |` for the two-column closed form.
pub const EQUAL_NORM_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GsvSolution {
    pub lambda_max: f64,
    /// `n x r`, orthonormal columns spanning the maximizing eigenspace.
    pub basis: DMatrix<f64>,
    /// `sum_i ||A_i v||^2` at the first basis column, recomputed from the stack.
    pub objective_check: f64,
    /// `max_j ||S v_j - lambda_max v_j||_2` with `S` the Gram sum.
    pub residual: f64,
    /// Every unit vector is a maximizer (multiplicity equals `n`).
    pub whole_space: bool,
}

impl GsvSolution {
    pub fn multiplicity(&self) -> usize {
        self.basis.ncols()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn first_vector(&self) -> DVector<f64> {
        self.basis.column(0).into_owned()
    }
}

/// Maximizes `sum_i ||A_i x||^2` over the unit sphere.
pub fn gsv_solve(stack: &OperatorStack, gap_rtol: f64) -> Result<GsvSolution> {
    let gram = gram_sum(stack)?;
    let pair = max_eigenpair(&gram, gap_rtol)?;
    let objective_check = stack.objective(&pair.vectors.column(0).into_owned());
    let whole_space = pair.multiplicity() == stack.ncols();
    Ok(GsvSolution {
        lambda_max: pair.value,
        basis: pair.vectors,
        objective_check,
        residual: pair.residual,
        whole_space,
    })
}

/// Closed form for a single `m x 2` matrix whose columns share a norm:
/// `||A||^2 = ||a1||^2 + |a1 . a2|`, attained on `(1, 1)/sqrt 2` when the dot
/// product is positive, on `(1, -1)/sqrt 2` when negative, and everywhere
/// on the circle when the columns are orthogonal.
pub fn gsv_solve_2col_equalnorm(a: &DMatrix<f64>) -> Result<GsvSolution> {
    if a.ncols() != 2 {
        return Err(Error::WrongShape(a.ncols()));
    }
    let stack = OperatorStack::single(a.clone())?;
    if stack.is_all_zero() {
        return Err(Error::AllZero);
    }
    let a1 = a.column(0);
    let a2 = a.column(1);
    let norm1 = a1.norm();
    let norm2 = a2.norm();
    if (norm1 - norm2).abs() > EQUAL_NORM_RTOL * norm1.max(1.0) {
        return Err(Error::ColumnNormMismatch { norm1, norm2 });
    }
    let sq = a1.norm_squared();
    let dot = a1.dot(&a2);
    let lambda_max = sq + dot.abs();

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let basis = if dot.abs() <= DOT_ZERO_RTOL * sq {
        DMatrix::identity(2, 2)
    } else {
        let mut v = if dot > 0.0 {
            DVector::from_vec(vec![h, h])
        } else {
            DVector::from_vec(vec![-h, h])
        };
        normalize_sign(&mut v);
        DMatrix::from_columns(&[v])
    };

    let gram = a.tr_mul(a);
    let residual = eigen_residual(&gram, lambda_max, &basis);
    let objective_check = stack.objective(&basis.column(0).into_owned());
    let whole_space = basis.ncols() == 2;
    Ok(GsvSolution {
        lambda_max,
        basis,
        objective_check,
        residual,
        whole_space,
    })
}

/// Field matrices and an SPD weight `R`, with `R` already factored.
///
/// Solves `max sum_i ||E_i psi||^2` subject to `psi^T R psi = 1`.
#[derive(Debug, Clone)]
pub struct WeightedProblem {
    fields: Vec<DMatrix<f64>>,
    resistance: DMatrix<f64>,
    cholesky: UpperCholesky,
}

impl WeightedProblem {
    pub fn new(fields: Vec<DMatrix<f64>>, resistance: DMatrix<f64>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::EmptyStack);
        }
        let n = resistance.nrows();
        for (i, e) in fields.iter().enumerate() {
            if e.ncols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "field matrix {} has {} columns, resistance is {}x{}",
                    i,
                    e.ncols(),
                    resistance.nrows(),
                    resistance.ncols()
                )));
            }
        }
        // validates finiteness of the fields too
        OperatorStack::new(fields.clone())?;
        let cholesky = UpperCholesky::factor(&resistance)?;
        Ok(Self {
            fields,
            resistance,
            cholesky,
        })
    }

    pub fn fields(&self) -> &[DMatrix<f64>] {
        &self.fields
    }

    pub fn resistance(&self) -> &DMatrix<f64> {
        &self.resistance
    }

    pub fn cholesky(&self) -> &UpperCholesky {
        &self.cholesky
    }

    /// The whitened stack `E_i C^{-1}`.
    pub fn whitened_stack(&self) -> Result<OperatorStack> {
        OperatorStack::new(
            self.fields
                .iter()
                .map(|e| self.cholesky.right_apply_inverse(e))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSolution {
    /// `C^{-1} phi` for `phi` the first basis column of `solution`.
    pub psi: DVector<f64>,
    /// The solution of the whitened problem.
    pub solution: GsvSolution,
}

/// Substitutes `phi = C psi`, solves the whitened stack, maps back.
pub fn weighted_gsv_solve(prob: &WeightedProblem, gap_rtol: f64) -> Result<WeightedSolution> {
    let stack = prob.whitened_stack()?;
    let solution = gsv_solve(&stack, gap_rtol)?;
    let psi = prob.cholesky.solve(&solution.first_vector());
    Ok(WeightedSolution { psi, solution })
}

/// Largest `sum_i ||A_i x||^2` over `samples` random unit directions.
///
/// Directions are normalized standard Gaussians drawn from a ChaCha stream
/// seeded with `seed`. The objective is evaluated straight from the matrices,
/// so the result is a lower bound on `lambda_max` that shares no code with
/// the eigen route.
pub fn brute_force_max(stack: &OperatorStack, samples: usize, seed: u64) -> Result<f64> {
    let n = stack.ncols();
    if n > ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: ORACLE_MAX_DIM,
        });
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }

    // all rows of all matrices, row-major
    let rows: Vec<f64> = stack
        .matrices()
        .iter()
        .flat_map(|m| (0..m.nrows()).flat_map(move |r| (0..n).map(move |c| m[(r, c)])))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = [0.0f64; ORACLE_MAX_DIM];
    let mut best = f64::NEG_INFINITY;
    for _ in 0..samples {
        let mut norm_sq = 0.0;
        for xi in x.iter_mut().take(n) {
            let g: f64 = StandardNormal.sample(&mut rng);
            *xi = g;
            norm_sq += g * g;
        }
        if norm_sq == 0.0 {
            continue;
        }
        let mut total = 0.0;
        for row in rows.chunks_exact(n) {
            let mut dot = 0.0;
            for (a, xi) in row.iter().zip(&x) {
                dot += a * xi;
            }
            total += dot * dot;
        }
        best = best.max(total / norm_sq);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::DEFAULT_GAP_RTOL;

    fn diag(d: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(d))
    }

    #[test]
    fn identity_is_whole_space() {
        let sol = gsv_solve(&OperatorStack::single(DMatrix::identity(2, 2)).unwrap(), DEFAULT_GAP_RTOL).unwrap();
        assert_eq!(sol.lambda_max, 1.0);
        assert_eq!(sol.multiplicity(), 2);
        assert!(sol.whole_space);
    }

    #[test]
    fn diagonal_pair() {
        let stack = OperatorStack::new(vec![diag(&[1.0, 0.0]), diag(&[0.0, 2.0])]).unwrap();
        let sol = gsv_solve(&stack, DEFAULT_GAP_RTOL).unwrap();
        assert_eq!(sol.lambda_max, 4.0);
        assert_eq!(sol.multiplicity(), 1);
        assert_eq!(sol.basis.as_slice(), &[0.0, 1.0]);
        assert_eq!(sol.objective_check, 4.0);
        assert!(!sol.whole_space);
    }

    #[test]
    fn all_zero_rejected() {
        let stack = OperatorStack::single(DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(gsv_solve(&stack, DEFAULT_GAP_RTOL), Err(Error::AllZero));
    }

    #[test]
    fn two_col_orthogonal_is_whole_circle() {
        let sol = gsv_solve_2col_equalnorm(&DMatrix::identity(2, 2)).unwrap();
        assert_eq!(sol.lambda_max, 1.0);
        assert!(sol.whole_space);
        assert_eq!(sol.basis, DMatrix::identity(2, 2));
    }

    #[test]
    fn two_col_positive_and_negative_dot() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let sol = gsv_solve_2col_equalnorm(&a).unwrap();
        assert_eq!(sol.lambda_max, 2.0);
        assert_eq!(sol.basis.as_slice(), &[h, h]);

        let a = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 0.0, 0.0]);
        let sol = gsv_solve_2col_equalnorm(&a).unwrap();
        assert_eq!(sol.lambda_max, 2.0);
        // (-h, h) up to sign; the sign convention picks (h, -h)
        assert_eq!(sol.basis.as_slice(), &[h, -h]);
        assert!(sol.residual < 1e-15);
    }

    #[test]
    fn two_col_errors() {
        assert_eq!(gsv_solve_2col_equalnorm(&DMatrix::identity(3, 3)), Err(Error::WrongShape(3)));
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 0.0]);
        assert!(matches!(gsv_solve_2col_equalnorm(&a), Err(Error::ColumnNormMismatch { .. })));
    }

    #[test]
    fn brute_force_examples() {
        let i2 = OperatorStack::single(DMatrix::identity(2, 2)).unwrap();
        for seed in [0, 1, 42] {
            assert_eq!(brute_force_max(&i2, 1000, seed).unwrap(), 1.0);
        }
        let big = OperatorStack::single(DMatrix::identity(11, 11)).unwrap();
        assert!(matches!(brute_force_max(&big, 10, 0), Err(Error::DimensionTooLarge { .. })));
        assert!(matches!(brute_force_max(&i2, 0, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn brute_force_is_reproducible() {
        let stack = OperatorStack::single(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        let a = brute_force_max(&stack, 10_000, 7).unwrap();
        let b = brute_force_max(&stack, 10_000, 7).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn weighted_rejects_bad_inputs() {
        let e = DMatrix::identity(2, 3);
        let r = DMatrix::identity(2, 2);
        assert!(matches!(WeightedProblem::new(vec![e.clone()], r), Err(Error::ShapeMismatch(_))));
        let mut r = DMatrix::identity(3, 3);
        r[(2, 2)] = -1.0;
        assert!(matches!(WeightedProblem::new(vec![e], r), Err(Error::NotSpd { pivot: 2, .. })));
    }
}
