//! Kernel functions and kernel ridge regression.

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::numerics::linalg::Cholesky;
use crate::numerics::matrix::dot;
use crate::numerics::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `exp(-‖x - y‖² / (2σ²))`
    Rbf { sigma: f64 },
    /// `⟨x, y⟩`
    Linear,
    /// `(⟨x, y⟩ + coef)^degree`
    Polynomial { degree: u32, coef: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { sigma } if !(sigma > 0.0) || !sigma.is_finite() => {
                bail!(Argument, "rbf sigma must be positive, got {sigma}")
            }
            KernelSpec::Polynomial { degree: 0, .. } => {
                bail!(Argument, "polynomial degree must be at least 1")
            }
            KernelSpec::Polynomial { coef, .. } if !coef.is_finite() => {
                bail!(Argument, "polynomial coefficient must be finite")
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Rbf { sigma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                libm::exp(-d2 / (2.0 * sigma * sigma))
            }
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Polynomial { degree, coef } => libm::pow(dot(x, y) + coef, degree as f64),
        }
    }
}

/// `K[i, j] = k(x1_i, x2_j)`.
pub fn kernel_matrix(x1: &Matrix, x2: &Matrix, spec: &KernelSpec) -> Result<Matrix> {
    spec.validate()?;
    if x1.cols() != x2.cols() {
        bail!(
            Shape,
            "kernel operands have {} and {} features",
            x1.cols(),
            x2.cols()
        );
    }
    Ok(Matrix::from_fn(x1.rows(), x2.rows(), |i, j| {
        spec.eval(x1.row(i), x2.row(j))
    }))
}

/// Solves `(K + λI) α = Y`.
pub fn krr_fit(k: &Matrix, y: &Matrix, lambda: f64) -> Result<Matrix> {
    let (n, m) = k.shape();
    if n != m {
        bail!(Argument, "kernel matrix must be square, got {n}x{m}");
    }
    if y.rows() != n {
        bail!(Shape, "kernel is {n}x{n} but targets have {} rows", y.rows());
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        bail!(Argument, "kernel ridge lambda must be positive, got {lambda}");
    }
    k.ensure_finite("kernel matrix")?;
    y.ensure_finite("target matrix")?;
    let tol = 1e-10 * k.max_abs().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (k[(i, j)] - k[(j, i)]).abs() > tol {
                bail!(Argument, "kernel matrix is not symmetric at ({i}, {j})");
            }
        }
    }
    let mut a = k.clone();
    a.add_diagonal(lambda);
    Cholesky::factor(&a)?.solve(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::symmetric_eigenvalues;
    use crate::numerics::{seeded_uniform, RngState};
    use crate::solvers::ridge::ridge_dual;
    use crate::Error;

    #[test]
    fn rbf_unit_diagonal_and_symmetry() {
        let x = seeded_uniform(12, 3, -1.0, 1.0, &mut RngState::new(1)).unwrap();
        let k = kernel_matrix(&x, &x, &KernelSpec::Rbf { sigma: 0.7 }).unwrap();
        for i in 0..12 {
            assert_eq!(k[(i, i)], 1.0);
            for j in 0..12 {
                assert_eq!(k[(i, j)], k[(j, i)]);
            }
        }
        let ev = symmetric_eigenvalues(&k).unwrap();
        assert!(ev[0] >= -1e-8 * 12.0);
    }

    #[test]
    fn linear_kernel_is_inner_product() {
        let mut rng = RngState::new(2);
        let a = seeded_uniform(4, 3, -1.0, 1.0, &mut rng).unwrap();
        let b = seeded_uniform(5, 3, -1.0, 1.0, &mut rng).unwrap();
        assert_eq!(
            kernel_matrix(&a, &b, &KernelSpec::Linear).unwrap(),
            a.matmul_t(&b).unwrap()
        );
    }

    #[test]
    fn wide_rbf_tends_to_ones() {
        let x = seeded_uniform(6, 2, -1.0, 1.0, &mut RngState::new(3)).unwrap();
        let k = kernel_matrix(&x, &x, &KernelSpec::Rbf { sigma: 1e6 }).unwrap();
        assert!(k.as_slice().iter().all(|v| (v - 1.0).abs() < 1e-6));
    }

    #[test]
    fn feature_mismatch() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 4);
        assert!(matches!(
            kernel_matrix(&a, &b, &KernelSpec::Linear),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn krr_identity_kernel() {
        let y = Matrix::from_rows(&[[2.0, 4.0], [6.0, -8.0], [1.0, 0.0]]).unwrap();
        let a = krr_fit(&Matrix::identity(3), &y, 1.0).unwrap();
        assert!(a.sub(&y.scale(0.5)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn krr_linear_equals_dual_ridge() {
        let mut rng = RngState::new(4);
        let x = seeded_uniform(25, 6, -1.0, 1.0, &mut rng).unwrap();
        let y = seeded_uniform(25, 2, -1.0, 1.0, &mut rng).unwrap();
        let xs = seeded_uniform(7, 6, -1.0, 1.0, &mut rng).unwrap();
        let k = kernel_matrix(&x, &x, &KernelSpec::Linear).unwrap();
        let alpha = krr_fit(&k, &y, 0.2).unwrap();
        let pred_k = kernel_matrix(&xs, &x, &KernelSpec::Linear)
            .unwrap()
            .matmul(&alpha)
            .unwrap();
        let pred_r = xs.matmul(&ridge_dual(&x, &y, 0.2).unwrap()).unwrap();
        let rel = pred_k.sub(&pred_r).unwrap().frobenius_norm() / pred_r.frobenius_norm();
        assert!(rel <= 1e-8);
    }

    #[test]
    fn krr_heavy_regularization() {
        let x = seeded_uniform(5, 2, -1.0, 1.0, &mut RngState::new(6)).unwrap();
        let y = Matrix::filled(5, 1, 1.0);
        let k = kernel_matrix(&x, &x, &KernelSpec::Rbf { sigma: 1.0 }).unwrap();
        let a = krr_fit(&k, &y, 1e9).unwrap();
        assert!(a.as_slice().iter().all(|v| (v - 1e-9).abs() < 1e-15));
        assert!(k.matmul(&a).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn krr_rejects_asymmetric() {
        let k = Matrix::from_rows(&[[1.0, 0.5], [0.2, 1.0]]).unwrap();
        let y = Matrix::column(&[1.0, 1.0]);
        assert!(matches!(krr_fit(&k, &y, 1.0), Err(Error::Argument(_))));
    }
}
