//! Restarted Lanczos with full reorthogonalization for the smallest
//! eigenpair of a symmetric operator.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

const KRYLOV_DIM: usize = 80;
const MAX_RESTARTS: usize = 2000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Returns `(θ, x, restarts)` once `residual(θ, x) ≤ tolerance`.
pub(super) fn smallest(
    op: impl Fn(&[f64]) -> Vec<f64>,
    n: usize,
    residual: impl Fn(f64, &[f64]) -> f64,
    tolerance: f64,
) -> Result<(f64, Vec<f64>, usize)> {
    let krylov = KRYLOV_DIM.min(n);
    let mut start = vec![1.0; n];
    normalize(&mut start);
    let mut last_residual = f64::INFINITY;
    for restart in 0..MAX_RESTARTS {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(krylov);
        let mut alpha = Vec::with_capacity(krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(krylov);
        basis.push(start.clone());
        for j in 0..krylov {
            let mut w = op(&basis[j]);
            let a = dot(&basis[j], &w);
            alpha.push(a);
            // Two passes of classical Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for v in &basis {
                    let h = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= h * vi);
                }
            }
            let b = normalize(&mut w);
            if j + 1 == krylov || b <= 1e-13 * a.abs().max(1.0) {
                break;
            }
            beta.push(b);
            basis.push(w);
        }
        let m = alpha.len();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty tridiagonal");
        let y = eig.eigenvectors.column(idx);
        let mut x = vec![0.0; n];
        for (coef, v) in y.iter().zip(&basis) {
            x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += coef * vi);
        }
        normalize(&mut x);
        // Rayleigh quotient of the normalized Ritz vector.
        let theta = dot(&x, &op(&x));
        last_residual = residual(theta, &x);
        if last_residual <= tolerance {
            return Ok((theta, x, restart + 1));
        }
        start = x;
    }
    Err(Error::Convergence {
        iterations: MAX_RESTARTS,
        residual: last_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_operator() {
        let d: Vec<f64> = (0..200).map(|i| 1.0 + i as f64 * 0.01).collect();
        let (theta, x, _) = smallest(
            |v| v.iter().zip(&d).map(|(a, b)| a * b).collect(),
            d.len(),
            |t, x| {
                x.iter()
                    .zip(&d)
                    .map(|(xi, di)| ((di - t) * xi).powi(2))
                    .sum::<f64>()
                    .sqrt()
            },
            1e-10,
        )
        .unwrap();
        assert!((theta - 1.0).abs() < 1e-12);
        assert!(x[0].abs() > 1.0 - 1e-8);
    }
}
