//! Path (pseudo-)metrics built from edge-length recipes, and the intrinsic
//! metric certificate `Σ_y b(x, y) d(x, y)² ≤ m(x)`.
//!
//! Lengths are stored per CSR arc slot of the graph they were built for. The
//! path-closed value on each edge (`edge_dist`) is what every downstream
//! boundary measure uses; full distance rows are computed on demand with
//! Dijkstra, since family truncations can be far too large for a dense matrix.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricRecipe {
    /// Length 1 on every edge.
    Natural,
    /// `((m/n)(x) ∧ (m/n)(y))^{1/2}`.
    Canonical,
    /// `(n(x) ∨ n(y))^{-1/2}`.
    InverseDegree,
    /// `((m/(n+c))(x) ∧ (m/(n+c))(y))^{1/2}`.
    PotentialAdapted,
    Custom,
}

impl MetricRecipe {
    pub fn name(self) -> &'static str {
        match self {
            MetricRecipe::Natural => "natural",
            MetricRecipe::Canonical => "canonical",
            MetricRecipe::InverseDegree => "inverse_degree",
            MetricRecipe::PotentialAdapted => "potential_adapted",
            MetricRecipe::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "natural" => MetricRecipe::Natural,
            "canonical" => MetricRecipe::Canonical,
            "inverse_degree" => MetricRecipe::InverseDegree,
            "potential_adapted" => MetricRecipe::PotentialAdapted,
            "custom" => MetricRecipe::Custom,
            other => return Err(Error::Metric(format!("unknown recipe `{other}`"))),
        })
    }
}

/// Result of comparing every edge distance against 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitComparison {
    /// `d ≥ 1` and `d ≤ 1` both hold (every edge has length exactly 1).
    Unit,
    AtLeastOne,
    AtMostOne,
    Mixed,
}

impl UnitComparison {
    pub fn is_comparable(self) -> bool {
        self != UnitComparison::Mixed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricAssignment {
    recipe: MetricRecipe,
    edge_length: Vec<f64>,
    edge_dist: Vec<f64>,
}

impl MetricAssignment {
    pub fn build(graph: &WeightedGraph, recipe: MetricRecipe) -> Result<Self> {
        let ratio: Vec<f64> = match recipe {
            MetricRecipe::Natural | MetricRecipe::InverseDegree => Vec::new(),
            MetricRecipe::Canonical => graph.vertices().map(|x| graph.m(x) / graph.n(x)).collect(),
            MetricRecipe::PotentialAdapted => graph
                .vertices()
                .map(|x| graph.m(x) / (graph.n(x) + graph.c(x)))
                .collect(),
            MetricRecipe::Custom => {
                return Err(Error::Metric(
                    "custom metrics need explicit lengths; use MetricAssignment::custom".into(),
                ))
            }
        };
        let mut edge_length = vec![0.0; graph.arc_count()];
        for x in graph.vertices() {
            for slot in graph.arc_range(x) {
                let y = graph.arc_target(slot);
                edge_length[slot] = match recipe {
                    MetricRecipe::Natural => 1.0,
                    MetricRecipe::InverseDegree => graph.n(x).max(graph.n(y)).powf(-0.5),
                    _ => ratio[x].min(ratio[y]).sqrt(),
                };
            }
        }
        Ok(Self::from_lengths(graph, recipe, edge_length))
    }

    /// Caller-supplied lengths, one entry per unordered edge (either orientation).
    pub fn custom(graph: &WeightedGraph, lengths: &[(VertexId, VertexId, f64)]) -> Result<Self> {
        Self::with_recipe(graph, MetricRecipe::Custom, lengths)
    }

    pub(crate) fn with_recipe(
        graph: &WeightedGraph,
        recipe: MetricRecipe,
        lengths: &[(VertexId, VertexId, f64)],
    ) -> Result<Self> {
        let mut edge_length = vec![f64::NAN; graph.arc_count()];
        for &(u, v, d) in lengths {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::Metric(format!(
                    "length of ({u}, {v}) must be finite and nonnegative, got {d}"
                )));
            }
            let (Some(fwd), Some(back)) = (graph.arc_slot(u, v), graph.arc_slot(v, u)) else {
                return Err(Error::Metric(format!("({u}, {v}) is not an edge")));
            };
            for slot in [fwd, back] {
                let old = edge_length[slot];
                if !old.is_nan() && old != d {
                    return Err(Error::Metric(format!(
                        "asymmetric lengths on ({u}, {v}): {old} vs {d}"
                    )));
                }
                edge_length[slot] = d;
            }
        }
        if let Some(slot) = edge_length.iter().position(|d| d.is_nan()) {
            let x = (0..graph.vertex_count())
                .find(|&x| graph.arc_range(x).contains(&slot))
                .unwrap();
            return Err(Error::Metric(format!(
                "no length given for edge ({x}, {})",
                graph.arc_target(slot)
            )));
        }
        Ok(Self::from_lengths(graph, recipe, edge_length))
    }

    /// Like [`custom`](Self::custom) but lengths come from a function of the
    /// unordered edge `(u, v)`, `u < v`.
    pub fn from_fn(
        graph: &WeightedGraph,
        mut length: impl FnMut(VertexId, VertexId) -> f64,
    ) -> Result<Self> {
        let lengths: Vec<_> = graph
            .edges()
            .map(|(u, v, _)| (u, v, length(u, v)))
            .collect();
        Self::custom(graph, &lengths)
    }

    fn from_lengths(graph: &WeightedGraph, recipe: MetricRecipe, edge_length: Vec<f64>) -> Self {
        let edge_dist = close_edges(graph, &edge_length);
        Self {
            recipe,
            edge_length,
            edge_dist,
        }
    }

    pub fn recipe(&self) -> MetricRecipe {
        self.recipe
    }

    /// Raw recipe length of the arc in `slot`.
    pub fn edge_length(&self, slot: usize) -> f64 {
        self.edge_length[slot]
    }

    /// Path-closed distance across the arc in `slot`.
    pub fn edge_dist(&self, slot: usize) -> f64 {
        self.edge_dist[slot]
    }

    pub fn edge_dists(&self) -> &[f64] {
        &self.edge_dist
    }

    /// `d(x, y)` for a neighboring pair, `None` if `x ≁ y`.
    pub fn dist_on_edge(&self, graph: &WeightedGraph, x: VertexId, y: VertexId) -> Option<f64> {
        graph.arc_slot(x, y).map(|s| self.edge_dist[s])
    }

    /// Every edge length multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            recipe: MetricRecipe::Custom,
            edge_length: self.edge_length.iter().map(|d| d * s).collect(),
            edge_dist: self.edge_dist.iter().map(|d| d * s).collect(),
        }
    }

    /// Single-source distances; unreachable vertices are `+∞`.
    pub fn distances_from(&self, graph: &WeightedGraph, source: VertexId) -> Vec<f64> {
        dijkstra(graph, &self.edge_dist, source, f64::INFINITY)
    }

    /// Dense all-pairs matrix. Quadratic memory; intended for small graphs.
    pub fn all_pairs(&self, graph: &WeightedGraph) -> Vec<Vec<f64>> {
        graph
            .vertices()
            .into_par_iter()
            .map(|x| self.distances_from(graph, x))
            .collect()
    }

    pub fn min_edge_dist(&self) -> Option<f64> {
        self.edge_dist.iter().copied().reduce(f64::min)
    }

    /// Compares every edge distance against 1 with exact comparisons.
    pub fn unit_comparison(&self) -> UnitComparison {
        let ge = self.edge_dist.iter().all(|&d| d >= 1.0);
        let le = self.edge_dist.iter().all(|&d| d <= 1.0);
        match (ge, le) {
            (true, true) => UnitComparison::Unit,
            (true, false) => UnitComparison::AtLeastOne,
            (false, true) => UnitComparison::AtMostOne,
            (false, false) => UnitComparison::Mixed,
        }
    }

    pub fn certify_intrinsic(&self, graph: &WeightedGraph) -> IntrinsicCertificate {
        self.certify_intrinsic_with(graph, DEFAULT_INTRINSIC_TOLERANCE)
    }

    /// `slack(x) = m(x) − Σ_y b(x, y) d(x, y)²`; intrinsic iff every
    /// `slack(x) ≥ −tolerance · m(x)`.
    pub fn certify_intrinsic_with(
        &self,
        graph: &WeightedGraph,
        tolerance: f64,
    ) -> IntrinsicCertificate {
        let slack: Vec<f64> = graph
            .vertices()
            .map(|x| {
                let load: f64 = graph
                    .arc_range(x)
                    .map(|s| graph.arc_weight(s) * self.edge_dist[s].powi(2))
                    .sum();
                graph.m(x) - load
            })
            .collect();
        let mut worst_vertex = 0;
        let mut worst = f64::INFINITY;
        let mut is_intrinsic = true;
        for x in graph.vertices() {
            let relative = slack[x] / graph.m(x);
            if relative < worst {
                worst = relative;
                worst_vertex = x;
            }
            if slack[x] < -tolerance * graph.m(x) {
                is_intrinsic = false;
            }
        }
        IntrinsicCertificate {
            slack,
            is_intrinsic,
            worst_vertex,
            tolerance,
        }
    }

    pub fn to_document(&self, graph: &WeightedGraph) -> MetricDocument {
        MetricDocument {
            recipe: self.recipe.name().to_owned(),
            edge_lengths: graph
                .vertices()
                .flat_map(|u| {
                    graph
                        .arc_range(u)
                        .filter(move |&s| u < graph.arc_target(s))
                        .map(move |s| (u, s))
                })
                .map(|(u, s)| EdgeLength {
                    u,
                    v: graph.arc_target(s),
                    d: self.edge_length[s],
                })
                .collect(),
        }
    }
}

pub const DEFAULT_INTRINSIC_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicCertificate {
    pub slack: Vec<f64>,
    pub is_intrinsic: bool,
    /// Vertex with the smallest relative slack.
    pub worst_vertex: VertexId,
    pub tolerance: f64,
}

impl IntrinsicCertificate {
    pub fn min_slack(&self) -> f64 {
        self.slack.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeLength {
    pub u: VertexId,
    pub v: VertexId,
    pub d: f64,
}

/// `{"recipe": string, "edge_lengths": [{"u","v","d"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDocument {
    pub recipe: String,
    pub edge_lengths: Vec<EdgeLength>,
}

impl MetricDocument {
    pub fn into_metric(self, graph: &WeightedGraph) -> Result<MetricAssignment> {
        let recipe = MetricRecipe::parse(&self.recipe)?;
        let lengths: Vec<_> = self.edge_lengths.iter().map(|e| (e.u, e.v, e.d)).collect();
        MetricAssignment::with_recipe(graph, recipe, &lengths)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: VertexId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra over per-slot lengths. Vertices farther than `limit` stay `+∞`.
fn dijkstra(graph: &WeightedGraph, lengths: &[f64], source: VertexId, limit: f64) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapEntry { dist: d, vertex: x }) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for slot in graph.arc_range(x) {
            let y = graph.arc_target(slot);
            let candidate = d + lengths[slot];
            if candidate < dist[y] && candidate <= limit {
                dist[y] = candidate;
                heap.push(HeapEntry {
                    dist: candidate,
                    vertex: y,
                });
            }
        }
    }
    dist
}

/// Shortest-path value across every edge.
fn close_edges(graph: &WeightedGraph, edge_length: &[f64]) -> Vec<f64> {
    let uniform = edge_length.windows(2).all(|w| w[0] == w[1]);
    if uniform {
        // Every path has at least one edge, so no path beats a direct edge.
        return edge_length.to_vec();
    }
    let per_vertex: Vec<Vec<f64>> = graph
        .vertices()
        .into_par_iter()
        .map(|x| {
            let range = graph.arc_range(x);
            let limit = edge_length[range.clone()]
                .iter()
                .copied()
                .fold(0.0, f64::max);
            // Only neighbors matter; a bounded search never leaves the ball of
            // radius `limit`.
            let dist = dijkstra_neighbors(graph, edge_length, x, limit);
            range
                .map(|s| dist(graph.arc_target(s)).min(edge_length[s]))
                .collect()
        })
        .collect();
    per_vertex.into_iter().flatten().collect()
}

fn dijkstra_neighbors<'a>(
    graph: &'a WeightedGraph,
    lengths: &'a [f64],
    source: VertexId,
    limit: f64,
) -> impl Fn(VertexId) -> f64 + 'a {
    // Sparse bounded Dijkstra keyed by a small map to stay cheap on huge graphs.
    let mut settled = std::collections::HashMap::new();
    let mut best = std::collections::HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(source, 0.0);
    heap.push(HeapEntry {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapEntry { dist: d, vertex: x }) = heap.pop() {
        if settled.contains_key(&x) {
            continue;
        }
        settled.insert(x, d);
        for slot in graph.arc_range(x) {
            let y = graph.arc_target(slot);
            let candidate = d + lengths[slot];
            if candidate <= limit
                && !settled.contains_key(&y)
                && best.get(&y).is_none_or(|&b| candidate < b)
            {
                best.insert(y, candidate);
                heap.push(HeapEntry {
                    dist: candidate,
                    vertex: y,
                });
            }
        }
    }
    move |y| settled.get(&y).copied().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{GraphFamily, MeasureConvention};
    use crate::graph::GraphBuilder;

    fn single_edge(m: f64) -> WeightedGraph {
        let mut b = GraphBuilder::new(vec![m, m]);
        b.edge(0, 1, 1.0);
        b.build()
    }

    #[test]
    fn canonical_single_edge() {
        let g = single_edge(1.0);
        let d = MetricAssignment::build(&g, MetricRecipe::Canonical).unwrap();
        assert_eq!(d.dist_on_edge(&g, 0, 1), Some(1.0));
        assert_eq!(d.distances_from(&g, 0), vec![0.0, 1.0]);
    }

    #[test]
    fn path_closure_shortcuts_heavy_edge() {
        let mut b = GraphBuilder::with_unit_measure(3);
        b.edge(0, 1, 1.0).edge(0, 2, 1.0).edge(2, 1, 1.0);
        let g = b.build();
        let d = MetricAssignment::custom(&g, &[(0, 1, 3.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let slot = g.arc_slot(0, 1).unwrap();
        assert_eq!(d.edge_length(slot), 3.0);
        assert_eq!(d.edge_dist(slot), 2.0);
        assert_eq!(d.all_pairs(&g)[0][1], 2.0);
    }

    #[test]
    fn canonical_tree_lengths() {
        let g = GraphFamily::KRegularTree {
            k: 2,
            radius: 3,
            measure: MeasureConvention::Unit,
        }
        .generate()
        .unwrap();
        let d = MetricAssignment::build(&g, MetricRecipe::Canonical).unwrap();
        let expected = 1.0 / 3f64.sqrt();
        // Edges between interior vertices, both endpoints of degree 3.
        for (x, y) in [(1, 3), (1, 4), (2, 5), (2, 6)] {
            let got = d.dist_on_edge(&g, x, y).unwrap();
            assert!((got - expected).abs() < 1e-15, "{x}-{y}: {got}");
        }
    }

    #[test]
    fn custom_rejects_bad_lengths() {
        let g = single_edge(1.0);
        assert!(matches!(
            MetricAssignment::custom(&g, &[(0, 1, -1.0)]),
            Err(Error::Metric(_))
        ));
        assert!(matches!(
            MetricAssignment::custom(&g, &[(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::Metric(_))
        ));
        assert!(matches!(
            MetricAssignment::custom(&g, &[]),
            Err(Error::Metric(_))
        ));
    }

    #[test]
    fn intrinsic_certificates() {
        let g = single_edge(1.0).with_weighted_degree_measure();
        let natural = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
        assert!(natural.certify_intrinsic(&g).is_intrinsic);

        let g = single_edge(0.5);
        let natural = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
        let cert = natural.certify_intrinsic(&g);
        assert!(!cert.is_intrinsic);
        assert_eq!(cert.slack, vec![-0.5, -0.5]);
        let canonical = MetricAssignment::build(&g, MetricRecipe::Canonical).unwrap();
        assert!(canonical.certify_intrinsic(&g).is_intrinsic);
    }

    #[test]
    fn document_round_trip() {
        let g = GraphFamily::Antitree {
            spheres: crate::family::SphereLaw::Square,
            radius: 2,
            measure: MeasureConvention::Unit,
        }
        .generate()
        .unwrap();
        let d = MetricAssignment::build(&g, MetricRecipe::InverseDegree).unwrap();
        let doc = d.to_document(&g);
        assert_eq!(doc.edge_lengths.len(), g.edge_count());
        let text = serde_json::to_string(&doc).unwrap();
        let back: MetricDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_metric(&g).unwrap(), d);
    }

    #[test]
    fn unit_comparison() {
        let g = single_edge(1.0);
        let d = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
        assert_eq!(d.unit_comparison(), UnitComparison::Unit);
        assert_eq!(d.scaled(0.5).unit_comparison(), UnitComparison::AtMostOne);
        assert_eq!(d.scaled(2.0).unit_comparison(), UnitComparison::AtLeastOne);
    }
}
