//! Generalized supporting vectors.
//!
//! A generalized supporting vector of matrices `A_1, ..., A_k` is a unit
//! vector maximizing `sum_i ||A_i x||^2`. The maximum is the largest
//! eigenvalue of `sum_i A_i^T A_i` and the maximizers are the unit vectors
//! of its eigenspace, so the whole problem reduces to one dense symmetric
//! eigensolve.
//!
//! Modules:
//! - [`spectra`]: Gram sums, maximal eigenpairs, Rayleigh quotients.
//! - [`gsv`]: the solver, the two-column closed form, the Cholesky-weighted
//!   variant, and a sampling oracle.
//! - [`stat_norm`]: standardized vectors, critical systems, ranking.
//! - [`density`]: truncated probability density operators.

pub mod density;
pub mod error;
pub mod gsv;
pub mod spectra;
pub mod stack;
pub mod stat_norm;
pub mod whiten;

pub use error::{Error, Result};
pub use gsv::{
    brute_force_max, gsv_solve, gsv_solve_2col_equalnorm, weighted_gsv_solve, GsvSolution,
    WeightedProblem, WeightedSolution,
};
pub use spectra::{
    gram_sum, max_eigenpair, rayleigh_quotient, EigenPair, SymmetricMatrix, DEFAULT_GAP_RTOL,
};
pub use stack::OperatorStack;
