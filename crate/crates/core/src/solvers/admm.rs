//! Elastic-net regression by ADMM.
//!
//! Minimizes `‖HW − T‖² + λ(α‖W‖₁ + (1−α)/2 ‖W‖²)` with the splitting
//! `f(X) = ‖HX − T‖²`, `g(Z) = λ(α‖Z‖₁ + (1−α)/2 ‖Z‖²)`, `X = Z`, in scaled
//! form. The X-update reuses one Cholesky factor of `2HᵀH + ρI`.

use serde::{Deserialize, Serialize};

use super::fista::soft_threshold;
use super::SolveReport;
use crate::error::{bail, Result};
use crate::numerics::linalg::Cholesky;
use crate::numerics::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElasticNetConfig {
    pub lambda: f64,
    /// Share of the penalty carried by the l1 term.
    pub alpha_mix: f64,
    /// ADMM penalty; `None` means `ρ = λ`.
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub primal_tol: f64,
    #[serde(default = "default_tol")]
    pub dual_tol: f64,
}

fn default_max_iters() -> usize {
    1000
}
fn default_tol() -> f64 {
    1e-6
}

impl ElasticNetConfig {
    pub fn new(lambda: f64, alpha_mix: f64) -> Self {
        ElasticNetConfig {
            lambda,
            alpha_mix,
            rho: None,
            max_iters: default_max_iters(),
            primal_tol: default_tol(),
            dual_tol: default_tol(),
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho.unwrap_or(self.lambda)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            bail!(Argument, "elastic-net lambda must be positive, got {}", self.lambda);
        }
        if !(0.0..=1.0).contains(&self.alpha_mix) {
            bail!(Argument, "alpha_mix must lie in [0, 1], got {}", self.alpha_mix);
        }
        let rho = self.rho();
        if !(rho > 0.0) || !rho.is_finite() {
            bail!(Argument, "ADMM rho must be positive, got {rho}");
        }
        if self.max_iters == 0 {
            bail!(Argument, "elastic-net max_iters must be at least 1");
        }
        if !(self.primal_tol > 0.0 && self.dual_tol > 0.0) {
            bail!(Argument, "ADMM tolerances must be positive");
        }
        Ok(())
    }
}

/// `‖HW − T‖² + λ(α‖W‖₁ + (1−α)/2 ‖W‖²)`
pub fn elastic_net_objective(
    h: &Matrix,
    t: &Matrix,
    w: &Matrix,
    lambda: f64,
    alpha_mix: f64,
) -> Result<f64> {
    let r = h.matmul(w)?.sub(t)?;
    Ok(r.squared_norm()
        + lambda * (alpha_mix * w.l1_norm() + 0.5 * (1.0 - alpha_mix) * w.squared_norm()))
}

/// Returns the sparse iterate `Z`. `converged` is true only when both the
/// primal residual `‖X − Z‖` and the dual residual `ρ‖Z − Z_prev‖` fell below
/// their tolerances.
pub fn admm_elastic_net(h: &Matrix, t: &Matrix, cfg: &ElasticNetConfig) -> Result<SolveReport> {
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
    let rho = cfg.rho();
    let mut system = h.gram().scale(2.0);
    system.add_diagonal(rho);
    let chol = Cholesky::factor(&system)?;
    let ht2 = h.t_matmul(t)?.scale(2.0);

    let l1_level = cfg.lambda * cfg.alpha_mix / rho;
    let shrink = rho / (rho + cfg.lambda * (1.0 - cfg.alpha_mix));

    let mut z = Matrix::zeros(p, k);
    let mut u = Matrix::zeros(p, k);
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_iters {
        iterations = it;
        let rhs = z.sub(&u)?.scale(rho).add(&ht2)?;
        let x = chol.solve(&rhs)?;
        let z_prev = core::mem::replace(
            &mut z,
            x.zip_with(&u, |xv, uv| shrink * soft_threshold(xv + uv, l1_level))?,
        );
        let mut primal = 0.0;
        let mut dual = 0.0;
        for idx in 0..p * k {
            let xv = x.as_slice()[idx];
            let zv = z.as_slice()[idx];
            u.as_mut_slice()[idx] += xv - zv;
            primal += (xv - zv) * (xv - zv);
            let dz = zv - z_prev.as_slice()[idx];
            dual += dz * dz;
        }
        let primal = libm::sqrt(primal);
        let dual = rho * libm::sqrt(dual);
        if primal <= cfg.primal_tol && dual <= cfg.dual_tol {
            converged = true;
            break;
        }
    }

    let objective = elastic_net_objective(h, t, &z, cfg.lambda, cfg.alpha_mix)?;
    Ok(SolveReport {
        solution: z,
        converged,
        iterations,
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{seeded_uniform, RngState};
    use crate::solvers::ridge::ridge_primal;

    #[test]
    fn pure_l2_is_ridge_with_half_lambda() {
        let mut rng = RngState::new(31);
        let h = seeded_uniform(40, 8, -1.0, 1.0, &mut rng).unwrap();
        let t = seeded_uniform(40, 2, -1.0, 1.0, &mut rng).unwrap();
        let mut cfg = ElasticNetConfig::new(0.8, 0.0);
        cfg.max_iters = 20_000;
        cfg.primal_tol = 1e-13;
        cfg.dual_tol = 1e-13;
        let r = admm_elastic_net(&h, &t, &cfg).unwrap();
        assert!(r.converged);
        let closed = ridge_primal(&h, &t, 0.4).unwrap();
        let rel = r.solution.sub(&closed).unwrap().frobenius_norm() / closed.frobenius_norm();
        assert!(rel <= 1e-8, "rel {rel}");
    }

    #[test]
    fn large_lambda_zeroes() {
        let mut rng = RngState::new(32);
        let h = seeded_uniform(20, 5, -1.0, 1.0, &mut rng).unwrap();
        let t = seeded_uniform(20, 1, -1.0, 1.0, &mut rng).unwrap();
        let r = admm_elastic_net(&h, &t, &ElasticNetConfig::new(1e6, 0.5)).unwrap();
        assert_eq!(r.solution, Matrix::zeros(5, 1));
    }

    #[test]
    fn rejects_bad_mix() {
        let h = Matrix::identity(2);
        let t = Matrix::column(&[1.0, 1.0]);
        assert!(admm_elastic_net(&h, &t, &ElasticNetConfig::new(1.0, 1.5)).is_err());
    }

    #[test]
    fn flag_reflects_residuals() {
        let mut rng = RngState::new(33);
        let h = seeded_uniform(15, 6, -1.0, 1.0, &mut rng).unwrap();
        let t = seeded_uniform(15, 1, -1.0, 1.0, &mut rng).unwrap();
        let mut cfg = ElasticNetConfig::new(0.5, 0.5);
        cfg.max_iters = 3;
        cfg.primal_tol = 1e-14;
        cfg.dual_tol = 1e-14;
        let r = admm_elastic_net(&h, &t, &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
