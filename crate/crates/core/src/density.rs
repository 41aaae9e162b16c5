//! Truncated probability density operators `D x = sum_n rho_n (x . e_n) e_n`
//! over the canonical orthonormal states.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gsv::{gsv_solve, GsvSolution};
use crate::stack::OperatorStack;

/// Slack allowed on the total probability mass.
pub const MASS_TOL: f64 = 1e-12;

const POSITIVITY_TOL: f64 = 1e-12;
const OBSERVABLE_SYMMETRY_RTOL: f64 = 1e-10;

pub const DEFAULT_TRUNCATION: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityModel {
    probs: Vec<f64>,
    tail: f64,
}

impl DensityModel {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability mass dropped by the truncation, `max(0, 1 - sum rho_n)`.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// `D x`, diagonal in the state basis.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.dim());
        x.component_mul(&DVector::from_column_slice(&self.probs))
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.probs))
    }

    /// Keeps the first `k` states; the dropped probabilities join the tail.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim() {
            return Err(Error::InvalidArgument(format!(
                "truncation must lie in 1..={}, got {k}",
                self.dim()
            )));
        }
        build_density(&self.probs[..k])
    }

    /// `||D - D_k||` for the rank-`k` truncation: the largest dropped probability.
    pub fn truncation_norm_gap(&self, k: usize) -> f64 {
        self.probs.iter().skip(k).copied().fold(0.0, f64::max)
    }

    /// `sum_{n > k} rho_n`, which dominates [`DensityModel::truncation_norm_gap`].
    pub fn truncation_mass(&self, k: usize) -> f64 {
        self.probs.iter().skip(k).sum()
    }
}

pub fn build_density(probs: &[f64]) -> Result<DensityModel> {
    if probs.is_empty() {
        return Err(Error::InvalidArgument("at least one probability is required".into()));
    }
    for (index, &value) in probs.iter().enumerate() {
        if value < 0.0 || !value.is_finite() {
            return Err(Error::NegativeProbability { index, value });
        }
    }
    let sum: f64 = probs.iter().sum();
    if sum > 1.0 + MASS_TOL {
        return Err(Error::MassExceedsOne { sum });
    }
    Ok(DensityModel {
        probs: probs.to_vec(),
        tail: (1.0 - sum).max(0.0),
    })
}

/// `rho_n = 2^{-n}` for `n = 1..=n_states`.
pub fn geometric_density(n_states: usize) -> Result<DensityModel> {
    let probs: Vec<f64> = (1..=n_states).map(|n| 0.5f64.powi(n as i32)).collect();
    build_density(&probs)
}

/// `(||D||, support_index)`: the largest probability and the smallest
/// 1-based index attaining it. `e_{support_index}` is a supporting vector.
pub fn density_norm(d: &DensityModel) -> (f64, usize) {
    let mut best = 0;
    for (i, &p) in d.probs.iter().enumerate() {
        if p > d.probs[best] {
            best = i;
        }
    }
    (d.probs[best], best + 1)
}

/// `sum rho_n`; it falls short of one by exactly the tail.
pub fn density_trace(d: &DensityModel) -> f64 {
    d.probs.iter().sum()
}

/// Checks `(D x | x) >= (D^2 x | x) >= 0` on `trials` seeded random unit vectors.
pub fn check_positivity_chain(d: &DensityModel, trials: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = d.dim();
    let mut x = vec![0.0; n];
    for _ in 0..trials {
        let mut norm_sq = 0.0;
        for xi in x.iter_mut() {
            let g: f64 = StandardNormal.sample(&mut rng);
            *xi = g;
            norm_sq += g * g;
        }
        if norm_sq == 0.0 {
            continue;
        }
        let mut first = 0.0;
        let mut second = 0.0;
        for (p, xi) in d.probs.iter().zip(&x) {
            let w = xi * xi / norm_sq;
            first += p * w;
            second += p * p * w;
        }
        if !(first >= second - POSITIVITY_TOL && second >= -POSITIVITY_TOL) {
            return false;
        }
    }
    true
}

/// Pure state jointly maximizing `sum_n ||T_n x||^2` for symmetric observables.
pub fn joint_magnitude_state(ops: &OperatorStack, gap_rtol: f64) -> Result<GsvSolution> {
    for t in ops.matrices() {
        if t.nrows() != t.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "observables must be square, got {}x{}",
                t.nrows(),
                t.ncols()
            )));
        }
        let asymmetry = (t - t.transpose()).norm();
        let bound = OBSERVABLE_SYMMETRY_RTOL * t.norm();
        if asymmetry > bound {
            return Err(Error::NotSymmetric { asymmetry, bound });
        }
    }
    gsv_solve(ops, gap_rtol)
}
