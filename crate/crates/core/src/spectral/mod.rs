//! Dirichlet restrictions of the graph form and their bottom eigenvalue.
//!
//! For `U ⊆ X` the form matrix acts on functions supported in `U`:
//! the diagonal keeps the full `n(x) + c(x)` (edges leaving `U` still cost
//! energy) while couplings to `X \ U` are dropped. The bottom of the spectrum
//! of `L_U` is the smallest eigenvalue of the pencil `(Q, M)`, solved through
//! the symmetric matrix `M^{-1/2} Q M^{-1/2}`.

mod lanczos;
pub mod verify;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};

pub use verify::{verify_cheeger, verify_essential, verify_upper_bound};

/// Dimension at and above which [`SolverMethod::Auto`] switches to Lanczos.
pub const DENSE_LIMIT: usize = 500;

/// Required `‖Qu − λMu‖ / ‖Mu‖`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FormMatrix {
    subset: Vec<VertexId>,
    /// Row offsets into `cols`/`vals`; the diagonal is stored separately.
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
    measure: Vec<f64>,
}

impl FormMatrix {
    pub fn assemble(graph: &WeightedGraph, subset: &[VertexId]) -> Result<Self> {
        let mut subset = subset.to_vec();
        subset.sort_unstable();
        subset.dedup();
        if subset.is_empty() {
            return Err(Error::Argument("U must be nonempty".into()));
        }
        if let Some(&x) = subset.last().filter(|&&x| x >= graph.vertex_count()) {
            return Err(Error::Argument(format!("vertex {x} out of range")));
        }
        let mut local = vec![usize::MAX; graph.vertex_count()];
        for (i, &x) in subset.iter().enumerate() {
            local[x] = i;
        }
        let mut offsets = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut diag = Vec::with_capacity(subset.len());
        for &x in &subset {
            let mut d = graph.c(x);
            for (y, w) in graph.neighbors(x) {
                if y == x {
                    continue;
                }
                d += w;
                if local[y] != usize::MAX {
                    cols.push(local[y]);
                    vals.push(-w);
                }
            }
            diag.push(d);
            offsets.push(cols.len());
        }
        let measure = subset.iter().map(|&x| graph.m(x)).collect();
        Ok(Self {
            subset,
            offsets,
            cols,
            vals,
            diag,
            measure,
        })
    }

    pub fn subset(&self) -> &[VertexId] {
        &self.subset
    }

    pub fn dim(&self) -> usize {
        self.subset.len()
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// `Q u` for `u` in local coordinates.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let off: f64 = (self.offsets[i]..self.offsets[i + 1])
                    .map(|s| self.vals[s] * u[self.cols[s]])
                    .sum();
                self.diag[i] * u[i] + off
            })
            .collect()
    }

    /// `uᵀ Q u`.
    pub fn evaluate(&self, u: &[f64]) -> f64 {
        self.apply(u).iter().zip(u).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut q = DMatrix::zeros(n, n);
        for i in 0..n {
            q[(i, i)] = self.diag[i];
            for s in self.offsets[i]..self.offsets[i + 1] {
                q[(i, self.cols[s])] += self.vals[s];
            }
        }
        q
    }

    /// `M^{-1/2} Q M^{-1/2} v`.
    fn apply_symmetrized(&self, v: &[f64], scale: &[f64]) -> Vec<f64> {
        let u: Vec<f64> = v.iter().zip(scale).map(|(a, s)| a * s).collect();
        self.apply(&u)
            .into_iter()
            .zip(scale)
            .map(|(a, s)| a * s)
            .collect()
    }

    /// `‖Qu − λMu‖ / ‖Mu‖`.
    pub fn relative_residual(&self, lambda: f64, u: &[f64]) -> f64 {
        let qu = self.apply(u);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.dim() {
            let mu = self.measure[i] * u[i];
            num += (qu[i] - lambda * mu).powi(2);
            den += mu * mu;
        }
        (num / den).sqrt()
    }
}

/// `Q(u) = ½ Σ_{x,y} b(x,y) (u(x) − u(y))² + Σ_x c(x) u(x)²`, summed over
/// arcs of the full graph.
pub fn quadratic_form(graph: &WeightedGraph, u: &[f64]) -> f64 {
    let mut edges = 0.0;
    for x in graph.vertices() {
        for (y, w) in graph.neighbors(x) {
            edges += w * (u[x] - u[y]).powi(2);
        }
    }
    let potential: f64 = graph.vertices().map(|x| graph.c(x) * u[x] * u[x]).sum();
    0.5 * edges + potential
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub lambda0: f64,
    pub subset: Vec<VertexId>,
    /// Ground state on `subset`, normalized to `‖u‖_m = 1`, largest-magnitude
    /// entry positive.
    pub eigenvector: Vec<f64>,
    pub residual: f64,
    pub method: SolverMethod,
    pub iterations: usize,
}

pub fn lambda0(form: &FormMatrix) -> Result<SpectralResult> {
    lambda0_with(form, SolverMethod::Auto)
}

pub fn lambda0_with(form: &FormMatrix, method: SolverMethod) -> Result<SpectralResult> {
    let method = match method {
        SolverMethod::Auto if form.dim() < DENSE_LIMIT => SolverMethod::Dense,
        SolverMethod::Auto => SolverMethod::Iterative,
        m => m,
    };
    let scale: Vec<f64> = form.measure.iter().map(|m| m.sqrt().recip()).collect();
    let (lambda, v, iterations) = match method {
        SolverMethod::Dense => {
            let (l, v) = dense_smallest(form, &scale);
            (l, v, 1)
        }
        _ => lanczos::smallest(
            |v| form.apply_symmetrized(v, &scale),
            form.dim(),
            |l, v| {
                let u: Vec<f64> = v.iter().zip(&scale).map(|(a, s)| a * s).collect();
                form.relative_residual(l, &u)
            },
            RESIDUAL_TOLERANCE * 0.5,
        )?,
    };
    let mut u: Vec<f64> = v.iter().zip(&scale).map(|(a, s)| a * s).collect();
    let norm = u
        .iter()
        .zip(&form.measure)
        .map(|(a, m)| a * a * m)
        .sum::<f64>()
        .sqrt();
    let pivot = u
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, &x)| {
            if x.abs() > bv {
                (i, x.abs())
            } else {
                (bi, bv)
            }
        })
        .0;
    let sign = if u[pivot] < 0.0 { -1.0 } else { 1.0 };
    u.iter_mut().for_each(|x| *x *= sign / norm);
    // Rayleigh quotient of the normalized vector; exact zero modes can come
    // out as tiny negatives.
    debug_assert!(lambda.is_finite());
    let lambda = form.evaluate(&u).max(0.0);
    let residual = form.relative_residual(lambda, &u);
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::Convergence {
            iterations,
            residual,
        });
    }
    Ok(SpectralResult {
        lambda0: lambda,
        subset: form.subset.clone(),
        eigenvector: u,
        residual,
        method,
        iterations,
    })
}

fn dense_smallest(form: &FormMatrix, scale: &[f64]) -> (f64, Vec<f64>) {
    let n = form.dim();
    let mut s = form.to_dense();
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] *= scale[i] * scale[j];
        }
    }
    let eig = SymmetricEigen::new(s);
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty matrix");
    (
        lambda,
        eig.eigenvectors.column(idx).iter().copied().collect(),
    )
}

/// Bottom of the Dirichlet spectrum on `subset`.
pub fn dirichlet_lambda0(graph: &WeightedGraph, subset: &[VertexId]) -> Result<SpectralResult> {
    lambda0(&FormMatrix::assemble(graph, subset)?)
}
