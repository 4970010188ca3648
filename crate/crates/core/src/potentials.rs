//! Potentials as cross edges: a graph with potential `c` on `X` becomes a
//! pure graph on `X ∪ X′` where `x` and its mirror `x′` are joined with
//! weight `c(x)` and length `δ(x)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificate::CertificateRecord;
use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, GraphDocument, VertexId, WeightedGraph};
use crate::isoperimetry::{normalize_set, CheegerResult, CutCosts, CutReport};
use crate::metric::{MetricAssignment, DEFAULT_INTRINSIC_TOLERANCE};
use crate::spectral::{dirichlet_lambda0, quadratic_form, verify::BOUND_TOLERANCE};

pub const CLAIM_FORM_IDENTITY: &str = "Q_bc(u) = Q_doubled(u + 0)";
pub const CLAIM_POTENTIAL_CHEEGER: &str = "lambda0(b,c) >= alpha_dot^2/2";
pub const FORM_TOLERANCE: f64 = 1e-12;

/// How the cross-edge term `c(x)δ(x)` enters the boundary measure of `W`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialBoundary {
    /// Once per vertex of `W`: the boundary of `W` in the doubled graph.
    #[default]
    PerVertex,
    /// Once per boundary pair `(x, y)` with `x ∈ W`, `y ∉ W`.
    PerBoundaryPair,
}

/// `δ(x) = ((m(x) − Σ_y b d²) / c(x))^½` where `c(x) > 0`, else `0`.
pub fn adapt_delta(graph: &WeightedGraph, metric: &MetricAssignment) -> Result<Vec<f64>> {
    let cert = metric.certify_intrinsic(graph);
    if !cert.is_intrinsic {
        return Err(Error::Precondition(format!(
            "metric is not intrinsic (slack {:.3e} at vertex {})",
            cert.slack[cert.worst_vertex], cert.worst_vertex
        )));
    }
    Ok(graph
        .vertices()
        .map(|x| {
            let c = graph.c(x);
            if c > 0.0 {
                (cert.slack[x].max(0.0) / c).sqrt()
            } else {
                0.0
            }
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct DoubledGraph {
    pub base: WeightedGraph,
    /// Vertex `x` and its mirror `x + |X|`; no potential.
    pub doubled: WeightedGraph,
    pub pairing: Vec<(VertexId, VertexId)>,
    pub delta: Vec<f64>,
    /// Distances on the `X` side only; the doubled graph never gets a full metric.
    pub metric: MetricAssignment,
}

/// Builds the doubled graph after checking `Σ b d² + c δ² ≤ m` at every vertex.
pub fn double(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    delta: &[f64],
) -> Result<DoubledGraph> {
    let n = graph.vertex_count();
    if delta.len() != n {
        return Err(Error::Argument(format!(
            "delta has {} entries for {n} vertices",
            delta.len()
        )));
    }
    if let Some(x) = delta.iter().position(|d| !(*d >= 0.0 && d.is_finite())) {
        return Err(Error::Argument(format!(
            "delta({x}) = {} is invalid",
            delta[x]
        )));
    }
    let cert = metric.certify_intrinsic(graph);
    let mut worst: Option<(VertexId, f64)> = None;
    for x in graph.vertices() {
        let excess = graph.c(x) * delta[x] * delta[x] - cert.slack[x];
        if excess > DEFAULT_INTRINSIC_TOLERANCE * graph.m(x)
            && worst.is_none_or(|(_, e)| excess > e)
        {
            worst = Some((x, excess));
        }
    }
    if let Some((x, excess)) = worst {
        return Err(Error::Precondition(format!(
            "adapted condition fails at vertex {x} by {excess:.3e}"
        )));
    }

    let mut measure = graph.measure().to_vec();
    measure.extend_from_slice(graph.measure());
    let mut builder = GraphBuilder::new(measure);
    for (u, v, b) in graph.edges() {
        builder.edge(u, v, b).edge(u + n, v + n, b);
    }
    for x in graph.vertices() {
        builder.edge(x, x + n, graph.c(x));
        if let Some(label) = graph.label(x) {
            builder.label(x, label).label(x + n, format!("{label}'"));
        }
    }
    Ok(DoubledGraph {
        base: graph.clone(),
        doubled: builder.build(),
        pairing: graph.vertices().map(|x| (x, x + n)).collect(),
        delta: delta.to_vec(),
        metric: metric.clone(),
    })
}

impl DoubledGraph {
    fn costs(&self, variant: PotentialBoundary) -> CutCosts {
        let mut costs = CutCosts::new(&self.base, &self.metric);
        for x in self.base.vertices() {
            let term = self.base.c(x) * self.delta[x];
            match variant {
                PotentialBoundary::PerVertex => costs.vertex[x] = term,
                PotentialBoundary::PerBoundaryPair => {
                    for slot in self.base.arc_range(x) {
                        costs.arc[slot] += term;
                    }
                }
            }
        }
        costs
    }

    /// `|∂W|` with the potential contribution reported in `potential_term`.
    pub fn boundary(&self, set: &[VertexId], variant: PotentialBoundary) -> Result<CutReport> {
        let set = normalize_set(&self.base, set)?;
        let mut report = self.costs(variant).report(&self.base, &set)?;
        let plain = CutCosts::new(&self.base, &self.metric).report(&self.base, &set)?;
        report.potential_term = Some(report.boundary_measure - plain.boundary_measure);
        Ok(report)
    }

    /// `α̇(U)` by exhaustive enumeration.
    pub fn cheeger_exact(
        &self,
        subset: &[VertexId],
        max_size: usize,
        variant: PotentialBoundary,
    ) -> Result<CheegerResult> {
        self.costs(variant).minimize(&self.base, subset, max_size)
    }

    /// Edge lengths for the doubled graph: `d` on both copies, `δ` across.
    /// Only for cross-checking; the certificates never use it.
    pub fn doubled_lengths(&self) -> Vec<(VertexId, VertexId, f64)> {
        let n = self.base.vertex_count();
        let mut lengths = Vec::new();
        for x in self.base.vertices() {
            for slot in self.base.arc_range(x) {
                let y = self.base.arc_target(slot);
                if x < y {
                    let d = self.metric.edge_dist(slot);
                    lengths.push((x, y, d));
                    lengths.push((x + n, y + n, d));
                }
            }
            if self.base.c(x) > 0.0 {
                lengths.push((x, x + n, self.delta[x]));
            }
        }
        lengths
    }

    pub fn to_document(&self) -> DoubledDocument {
        DoubledDocument {
            graph: GraphDocument::from_graph(&self.doubled),
            pairing: self
                .pairing
                .iter()
                .map(|&(x, mirror)| PairRecord {
                    x,
                    mirror,
                    c: self.base.c(x),
                    delta: self.delta[x],
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub x: VertexId,
    pub mirror: VertexId,
    pub c: f64,
    pub delta: f64,
}

/// The standard graph document plus a `pairing` block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoubledDocument {
    #[serde(flatten)]
    pub graph: GraphDocument,
    pub pairing: Vec<PairRecord>,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// `Q_{b,c}(u)` on the base graph against `Q(u ⊕ 0)` on the doubled graph
/// for `u = 0` and `trials` random `u`. The record is `tolerance ≥ max gap`.
pub fn verify_potential_form_identity(
    doubled: &DoubledGraph,
    trials: usize,
    seed: u64,
) -> CertificateRecord {
    let n = doubled.base.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lifted = vec![0.0; 2 * n];
    let mut worst = relative_gap(
        quadratic_form(&doubled.base, &lifted[..n]),
        quadratic_form(&doubled.doubled, &lifted),
    );
    for _ in 0..trials {
        for v in &mut lifted[..n] {
            *v = rng.gen_range(-1.0..1.0);
        }
        let base = quadratic_form(&doubled.base, &lifted[..n]);
        let mirror = quadratic_form(&doubled.doubled, &lifted);
        worst = worst.max(relative_gap(base, mirror));
    }
    CertificateRecord::inequality(CLAIM_FORM_IDENTITY, FORM_TOLERANCE, worst, 0.0)
        .with("max_relative_gap", worst)
        .with("trials", trials)
        .with("seed", seed)
}

/// Dirichlet `λ₀` of `Q_{b,c}` on `U` against `α̇(U)²/2`.
pub fn verify_potential_cheeger(
    doubled: &DoubledGraph,
    subset: &[VertexId],
    max_size: usize,
    variant: PotentialBoundary,
) -> Result<CertificateRecord> {
    let cheeger = doubled.cheeger_exact(subset, max_size, variant)?;
    let ground = dirichlet_lambda0(&doubled.base, subset)?;
    let cut = doubled.boundary(&cheeger.optimal_set, variant)?;
    let alpha = cheeger.alpha;
    Ok(CertificateRecord::inequality(
        CLAIM_POTENTIAL_CHEEGER,
        ground.lambda0,
        alpha * alpha / 2.0,
        BOUND_TOLERANCE,
    )
    .with("alpha_dot", alpha)
    .with("boundary", variant)
    .with("optimal_cut", cut)
    .with("U", &ground.subset)
    .with("residual", ground.residual))
}
