//! Closed-form least squares: ridge in primal and dual form, and the
//! minimum-norm pseudoinverse solution.

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::numerics::linalg::{svd, Cholesky};
use crate::numerics::Matrix;

/// Which normal-equation system to factor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    /// `(DᵀD + λI)` of size p × p.
    Primal,
    /// `(DDᵀ + λI)` of size n × n.
    Dual,
    /// Dual when `n < p`, primal otherwise.
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RidgeConfig {
    pub lambda: f64,
    #[serde(default)]
    pub mode: SolveMode,
}

impl RidgeConfig {
    pub fn new(lambda: f64) -> Self {
        RidgeConfig {
            lambda,
            mode: SolveMode::Auto,
        }
    }
}

fn check_system(d: &Matrix, y: &Matrix) -> Result<()> {
    if d.rows() != y.rows() {
        bail!(
            Shape,
            "design has {} rows but targets have {}",
            d.rows(),
            y.rows()
        );
    }
    d.ensure_finite("design matrix")?;
    y.ensure_finite("target matrix")
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        bail!(Argument, "ridge lambda must be positive and finite, got {lambda}");
    }
    Ok(())
}

/// `β = (DᵀD + λI)⁻¹DᵀY` through a Cholesky solve.
pub fn ridge_primal(d: &Matrix, y: &Matrix, lambda: f64) -> Result<Matrix> {
    check_lambda(lambda)?;
    check_system(d, y)?;
    let mut g = d.gram();
    g.add_diagonal(lambda);
    let rhs = d.t_matmul(y)?;
    Cholesky::factor(&g)?.solve(&rhs)
}

/// `β = Dᵀ(DDᵀ + λI)⁻¹Y` through a Cholesky solve.
pub fn ridge_dual(d: &Matrix, y: &Matrix, lambda: f64) -> Result<Matrix> {
    check_lambda(lambda)?;
    check_system(d, y)?;
    let mut k = d.outer_gram();
    k.add_diagonal(lambda);
    let a = Cholesky::factor(&k)?.solve(y)?;
    d.t_matmul(&a)
}

/// Ridge with mode dispatch; `λ = 0` takes the pseudoinverse path.
pub fn ridge(d: &Matrix, y: &Matrix, cfg: RidgeConfig) -> Result<Matrix> {
    if cfg.lambda == 0.0 {
        return pinv_solve(d, y);
    }
    match cfg.mode {
        SolveMode::Primal => ridge_primal(d, y, cfg.lambda),
        SolveMode::Dual => ridge_dual(d, y, cfg.lambda),
        SolveMode::Auto if d.rows() < d.cols() => ridge_dual(d, y, cfg.lambda),
        SolveMode::Auto => ridge_primal(d, y, cfg.lambda),
    }
}

/// Minimum-norm least-squares solution `D⁺Y`.
///
/// Singular values below `max(n, p) · ε · σ_max` are treated as zero.
pub fn pinv_solve(d: &Matrix, y: &Matrix) -> Result<Matrix> {
    check_system(d, y)?;
    let (n, p) = d.shape();
    let k = y.cols();
    let dec = svd(d);
    let smax = dec.s.first().copied().unwrap_or(0.0);
    let cutoff = (n.max(p) as f64) * f64::EPSILON * smax;
    // β = V Σ⁺ Uᵀ Y
    let uty = dec.u.t_matmul(y)?;
    let r = dec.s.len();
    let mut scaled = Matrix::zeros(r, k);
    for (i, &s) in dec.s.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            for j in 0..k {
                scaled[(i, j)] = uty[(i, j)] / s;
            }
        }
    }
    dec.v.matmul(&scaled)
}
