//! Dense factorizations used by the solvers.

use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{dot, Matrix};
use crate::error::{bail, Result};

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &Matrix) -> Result<Self> {
        let (n, m) = a.shape();
        if n != m {
            bail!(Shape, "cholesky of non-square {n}x{m} matrix");
        }
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let row_j = &l[j * n..j * n + j];
            let d = a[(j, j)] - dot(row_j, row_j);
            if !(d > 0.0) || !d.is_finite() {
                bail!(Numeric, "matrix is not positive definite (pivot {j} = {d:e})");
            }
            let djj = libm::sqrt(d);
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let s = a[(i, j)] - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
                l[i * n + j] = s / djj;
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        let n = self.n;
        if b.rows() != n {
            bail!(Shape, "rhs has {} rows, factor is {n}x{n}", b.rows());
        }
        let k = b.cols();
        let mut x = b.clone();
        let mut col = vec![0.0; n];
        for c in 0..k {
            for i in 0..n {
                col[i] = x[(i, c)];
            }
            // forward: L y = b
            for i in 0..n {
                let s = col[i] - dot(&self.l[i * n..i * n + i], &col[..i]);
                col[i] = s / self.l[i * n + i];
            }
            // backward: Lᵀ x = y
            for i in (0..n).rev() {
                let mut s = col[i];
                for (j, v) in col.iter().enumerate().skip(i + 1) {
                    s -= self.l[j * n + i] * v;
                }
                col[i] = s / self.l[i * n + i];
            }
            for i in 0..n {
                x[(i, c)] = col[i];
            }
        }
        Ok(x)
    }
}

/// Thin singular value decomposition `A = U diag(s) Vᵀ`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// m × r
    pub u: Matrix,
    /// length r, descending
    pub s: Vec<f64>,
    /// n × r
    pub v: Matrix,
}

/// One-sided Jacobi SVD. Accurate for the small dense problems this crate
/// targets; cost is O(sweeps · m · n²).
pub fn svd(a: &Matrix) -> Svd {
    let (m, n) = a.shape();
    if m < n {
        let t = svd(&a.transpose());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    // columns of the working copy and of V
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    let eps = f64::EPSILON;
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if gamma == 0.0 || gamma.abs() <= eps * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let (ci, cj) = split_pair(&mut cols, i, j);
                rotate(ci, cj, c, s);
                let (vi, vj) = split_pair(&mut v, i, j);
                rotate(vi, vj, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| libm::sqrt(dot(c, c))).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        s.push(sigma);
        for i in 0..m {
            u[(i, k)] = if sigma > 0.0 { cols[j][i] / sigma } else { 0.0 };
        }
        for i in 0..n {
            vm[(i, k)] = v[j][i];
        }
    }
    Svd { u, s, v: vm }
}

fn split_pair<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    debug_assert!(i < j);
    let (a, b) = v.split_at_mut(j);
    (&mut a[i], &mut b[0])
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (p, q) = (*a, *b);
        *a = c * p - s * q;
        *b = s * p + c * q;
    }
}

/// Largest singular value of `h` by power iteration on `hᵀh`.
pub fn spectral_norm(h: &Matrix, max_iters: usize, tol: f64) -> f64 {
    let p = h.cols();
    if p == 0 || h.rows() == 0 {
        return 0.0;
    }
    let mut v: Vec<f64> = (0..p).map(|i| 1.0 + (i % 7) as f64 / 10.0).collect();
    normalize(&mut v);
    let mut estimate = 0.0;
    for _ in 0..max_iters.max(1) {
        let hv: Vec<f64> = (0..h.rows()).map(|i| dot(h.row(i), &v)).collect();
        let next_est = libm::sqrt(dot(&hv, &hv));
        let mut w = vec![0.0; p];
        for (i, &a) in hv.iter().enumerate() {
            for (wj, hij) in w.iter_mut().zip(h.row(i)) {
                *wj += a * hij;
            }
        }
        if normalize(&mut w) == 0.0 {
            return next_est;
        }
        v = w;
        let done = (next_est - estimate).abs() <= tol * next_est.max(f64::MIN_POSITIVE);
        estimate = next_est;
        if done {
            break;
        }
    }
    let hv: Vec<f64> = (0..h.rows()).map(|i| dot(h.row(i), &v)).collect();
    libm::sqrt(dot(&hv, &hv)).max(estimate)
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = libm::sqrt(dot(v, v));
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotation, ascending.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    let (n, m) = a.shape();
    if n != m {
        bail!(Shape, "eigenvalues of non-square {n}x{m} matrix");
    }
    let mut w = a.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += w[(i, j)] * w[(i, j)];
            }
        }
        if off <= 1e-30 * (1.0 + w.squared_norm()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = w[(k, p)];
                    let akq = w[(k, q)];
                    w[(k, p)] = c * akp - s * akq;
                    w[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = w[(p, k)];
                    let aqk = w[(q, k)];
                    w[(p, k)] = c * apk - s * aqk;
                    w[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| w[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::{seeded_uniform, RngState};

    #[test]
    fn cholesky_solves_spd_system() {
        let a = Matrix::from_rows(&[[4.0, 2.0, 0.6], [2.0, 5.0, 1.0], [0.6, 1.0, 3.0]]).unwrap();
        let b = Matrix::from_rows(&[[1.0, 0.0], [2.0, 1.0], [3.0, -1.0]]).unwrap();
        let x = Cholesky::factor(&a).unwrap().solve(&b).unwrap();
        let r = a.matmul(&x).unwrap().sub(&b).unwrap();
        assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(Cholesky::factor(&a).is_err());
    }

    #[test]
    fn svd_reconstructs() {
        let mut rng = RngState::new(9);
        for (m, n) in [(7, 4), (4, 7), (5, 5)] {
            let a = seeded_uniform(m, n, -1.0, 1.0, &mut rng).unwrap();
            let d = svd(&a);
            let r = d.s.len();
            let us = Matrix::from_fn(m, r, |i, k| d.u[(i, k)] * d.s[k]);
            let back = us.matmul_t(&d.v).unwrap();
            assert!(back.sub(&a).unwrap().max_abs() < 1e-12, "{m}x{n}");
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn power_iteration_matches_svd() {
        let a = seeded_uniform(12, 6, -1.0, 1.0, &mut RngState::new(4)).unwrap();
        let top = svd(&a).s[0];
        let est = spectral_norm(&a, 200, 1e-12);
        assert!((top - est).abs() / top < 1e-8, "{top} vs {est}");
    }

    #[test]
    fn eigenvalues_of_diagonalizable() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let ev = symmetric_eigenvalues(&a).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }
}
