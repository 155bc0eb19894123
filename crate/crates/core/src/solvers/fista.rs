//! l1-regularized least squares by FISTA.
//!
//! Minimizes `‖HW − T‖² + λ‖W‖₁` (no ½ on the quadratic term). The gradient
//! of the data term is `2Hᵀ(HW − T)` with Lipschitz constant `2σ_max(H)²`,
//! so the soft-threshold level per step is `λ / L`.
//!
//! The iteration is made monotone by a function-value restart: a candidate
//! that increases the objective is discarded and the momentum is reset. If a
//! plain proximal step from the current iterate still fails to descend, the
//! Lipschitz estimate (from power iteration, hence a lower bound) is doubled.

use serde::{Deserialize, Serialize};

use super::SolveReport;
use crate::error::{bail, Result};
use crate::numerics::linalg::spectral_norm;
use crate::numerics::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct L1Config {
    pub lambda: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Relative objective change that counts as converged.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_power_iters")]
    pub power_iters: usize,
    #[serde(default = "default_power_tol")]
    pub power_tol: f64,
}

fn default_max_iters() -> usize {
    500
}
fn default_tol() -> f64 {
    1e-6
}
fn default_power_iters() -> usize {
    50
}
fn default_power_tol() -> f64 {
    1e-6
}

impl L1Config {
    pub fn new(lambda: f64) -> Self {
        L1Config {
            lambda,
            max_iters: default_max_iters(),
            tol: default_tol(),
            power_iters: default_power_iters(),
            power_tol: default_power_tol(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            bail!(Argument, "l1 lambda must be positive, got {}", self.lambda);
        }
        if self.max_iters == 0 {
            bail!(Argument, "l1 max_iters must be at least 1");
        }
        if !(self.tol > 0.0) {
            bail!(Argument, "l1 tolerance must be positive, got {}", self.tol);
        }
        Ok(())
    }
}

/// `‖HW − T‖² + λ‖W‖₁`
pub fn lasso_objective(h: &Matrix, t: &Matrix, w: &Matrix, lambda: f64) -> Result<f64> {
    let r = h.matmul(w)?.sub(t)?;
    Ok(r.squared_norm() + lambda * w.l1_norm())
}

#[inline]
pub(crate) fn soft_threshold(v: f64, level: f64) -> f64 {
    if v > level {
        v - level
    } else if v < -level {
        v + level
    } else {
        0.0
    }
}

pub fn fista_lasso(h: &Matrix, t: &Matrix, cfg: &L1Config) -> Result<SolveReport> {
    cfg.validate()?;
    if h.rows() != t.rows() {
        bail!(
            Shape,
            "design has {} rows but targets have {}",
            h.rows(),
            t.rows()
        );
    }
    h.ensure_finite("design matrix")?;
    t.ensure_finite("target matrix")?;

    let (p, k) = (h.cols(), t.cols());
    let gram = h.gram();
    let ht = h.t_matmul(t)?;
    let sigma = spectral_norm(h, cfg.power_iters, cfg.power_tol);
    let mut lip = 2.0 * sigma * sigma;

    let mut x = Matrix::zeros(p, k);
    let mut f_x = t.squared_norm();
    if lip == 0.0 {
        return Ok(SolveReport {
            solution: x,
            converged: true,
            iterations: 0,
            objective: f_x,
        });
    }

    let mut y = x.clone();
    let mut y_is_x = true;
    let mut momentum = 1.0_f64;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_iters {
        iterations = it;
        let step = 1.0 / lip;
        // gradient at y: 2(G y − Hᵀt)
        let gy = gram.matmul(&y)?;
        let mut z = Matrix::zeros(p, k);
        {
            let level = cfg.lambda * step;
            let zs = z.as_mut_slice();
            for (idx, zv) in zs.iter_mut().enumerate() {
                let g = 2.0 * (gy.as_slice()[idx] - ht.as_slice()[idx]);
                *zv = soft_threshold(y.as_slice()[idx] - step * g, level);
            }
        }
        let f_z = lasso_objective(h, t, &z, cfg.lambda)?;

        if f_z > f_x {
            if y_is_x {
                lip *= 2.0;
            } else {
                y = x.clone();
                y_is_x = true;
                momentum = 1.0;
            }
            continue;
        }

        let next = (1.0 + libm::sqrt(1.0 + 4.0 * momentum * momentum)) / 2.0;
        let beta = (momentum - 1.0) / next;
        y = z.zip_with(&x, |zv, xv| zv + beta * (zv - xv))?;
        y_is_x = beta == 0.0;
        let rel = (f_x - f_z) / f_x.abs().max(f64::MIN_POSITIVE);
        x = z;
        f_x = f_z;
        momentum = next;
        if rel <= cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(SolveReport {
        solution: x,
        converged,
        iterations,
        objective: f_x,
    })
}
