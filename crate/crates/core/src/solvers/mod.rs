//! Regression solvers for output and decoder weights.

pub mod admm;
pub mod fista;
pub mod kernel;
pub mod ridge;

pub use admm::{admm_elastic_net, elastic_net_objective, ElasticNetConfig};
pub use fista::{fista_lasso, lasso_objective, L1Config};
pub use kernel::{kernel_matrix, krr_fit, KernelSpec};
pub use ridge::{pinv_solve, ridge, ridge_dual, ridge_primal, RidgeConfig, SolveMode};

use crate::numerics::Matrix;

/// Outcome of an iterative solver.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solution: Matrix,
    /// False when the iteration cap was hit before the stopping rule fired.
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
}
