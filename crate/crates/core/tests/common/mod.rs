//! Reference computations that read only the raw graph data (`b`, `m`, `c`)
//! and recompute everything else from scratch.
#![allow(dead_code)]

use cheeger_core::{VertexId, WeightedGraph};
use nalgebra::{DMatrix, SymmetricEigen};

/// Dense copy of the graph data.
pub struct Dense {
    pub n: usize,
    pub b: Vec<Vec<f64>>,
    pub m: Vec<f64>,
    pub c: Vec<f64>,
    pub adj: Vec<Vec<usize>>,
}

impl Dense {
    pub fn of(g: &WeightedGraph) -> Self {
        let n = g.vertex_count();
        let mut b = vec![vec![0.0; n]; n];
        let mut adj = vec![Vec::new(); n];
        for (u, v, w) in g.edges() {
            b[u][v] = w;
            b[v][u] = w;
            adj[u].push(v);
            adj[v].push(u);
        }
        Self {
            n,
            b,
            m: g.measure().to_vec(),
            c: g.potential().to_vec(),
            adj,
        }
    }

    pub fn degree(&self, x: usize) -> f64 {
        self.b[x].iter().sum()
    }

    pub fn natural_lengths(&self) -> Vec<Vec<f64>> {
        self.lengths(|_, _| 1.0)
    }

    pub fn canonical_lengths(&self) -> Vec<Vec<f64>> {
        let r: Vec<f64> = (0..self.n).map(|x| self.m[x] / self.degree(x)).collect();
        self.lengths(|x, y| r[x].min(r[y]).sqrt())
    }

    pub fn inverse_degree_lengths(&self) -> Vec<Vec<f64>> {
        let deg: Vec<f64> = (0..self.n).map(|x| self.degree(x)).collect();
        self.lengths(|x, y| 1.0 / deg[x].max(deg[y]).sqrt())
    }

    pub fn potential_adapted_lengths(&self) -> Vec<Vec<f64>> {
        let r: Vec<f64> = (0..self.n)
            .map(|x| self.m[x] / (self.degree(x) + self.c[x]))
            .collect();
        self.lengths(|x, y| r[x].min(r[y]).sqrt())
    }

    /// Edge lengths from a rule, `∞` off edges, `0` on the diagonal.
    pub fn lengths(&self, rule: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
        let mut len = vec![vec![f64::INFINITY; self.n]; self.n];
        for x in 0..self.n {
            len[x][x] = 0.0;
            for &y in &self.adj[x] {
                len[x][y] = rule(x, y);
            }
        }
        len
    }

    /// Floyd–Warshall path metric.
    pub fn closure(&self, mut len: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        for k in 0..self.n {
            for i in 0..self.n {
                let ik = len[i][k];
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..self.n {
                    let via = ik + len[k][j];
                    if via < len[i][j] {
                        len[i][j] = via;
                    }
                }
            }
        }
        len
    }

    pub fn hops(&self, root: usize) -> Vec<usize> {
        let mut hop = vec![usize::MAX; self.n];
        hop[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if hop[y] == usize::MAX {
                    hop[y] = hop[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        hop
    }

    /// `Σ_{x∈W, y∉W} b d + Σ_{x∈W} extra(x)`.
    pub fn boundary(&self, dist: &[Vec<f64>], w: &[usize], extra: &[f64]) -> f64 {
        let mut inside = vec![false; self.n];
        w.iter().for_each(|&x| inside[x] = true);
        let mut total = 0.0;
        for &x in w {
            total += extra[x];
            for &y in &self.adj[x] {
                if !inside[y] {
                    total += self.b[x][y] * dist[x][y];
                }
            }
        }
        total
    }

    pub fn volume(&self, w: &[usize]) -> f64 {
        w.iter().map(|&x| self.m[x]).sum()
    }

    /// `min_{∅≠W⊆U} boundary(W) / m(W)` by listing every subset.
    pub fn alpha(&self, dist: &[Vec<f64>], u: &[usize], extra: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        let mut w = Vec::with_capacity(u.len());
        for mask in 1u64..(1 << u.len()) {
            w.clear();
            w.extend((0..u.len()).filter(|i| mask >> i & 1 == 1).map(|i| u[i]));
            best = best.min(self.boundary(dist, &w, extra) / self.volume(&w));
        }
        best
    }

    /// Smallest eigenvalue of `M^{-1/2} Q M^{-1/2}` with
    /// `Q = diag(n + c) − b` restricted to `U`.
    pub fn lambda0(&self, u: &[usize]) -> f64 {
        let k = u.len();
        let mut a = DMatrix::zeros(k, k);
        for (i, &x) in u.iter().enumerate() {
            for (j, &y) in u.iter().enumerate() {
                let q = if i == j {
                    self.degree(x) + self.c[x]
                } else {
                    -self.b[x][y]
                };
                a[(i, j)] = q / (self.m[x] * self.m[y]).sqrt();
            }
        }
        SymmetricEigen::new(a).eigenvalues.min()
    }

    /// `½ Σ b (u(x) − u(y))² + Σ c u²` from the dense data.
    pub fn form(&self, u: &[f64]) -> f64 {
        let mut total = 0.0;
        for x in 0..self.n {
            total += self.c[x] * u[x] * u[x];
            for &y in &self.adj[x] {
                if x < y {
                    total += self.b[x][y] * (u[x] - u[y]).powi(2);
                }
            }
        }
        total
    }
}

/// Signed comparison within a relative tolerance.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn all_vertices(g: &WeightedGraph) -> Vec<VertexId> {
    g.vertices().collect()
}
