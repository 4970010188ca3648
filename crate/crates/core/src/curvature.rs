//! Edge orientations and the oriented curvature
//! `K(x) = (Σ_{(x,y)∈E₋} b d − Σ_{(x,y)∈E₊} b d) / m(x)`.
//!
//! If `−K ≥ k ≥ 0` on `W` then `k·m(W) ≤ |∂W|`: summing `−K m` over `W`
//! cancels the oriented edges inside `W` and leaves at most the boundary.

use serde::{Deserialize, Serialize};

use crate::certificate::CertificateRecord;
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::isoperimetry::{self, CutCosts};
use crate::metric::MetricAssignment;

pub const CLAIM_CURVATURE: &str = "alpha(U) >= inf_U(-K)";

const CHAIN_TOLERANCE: f64 = 1e-9;

/// Signs `σ(x, y) ∈ {+1, −1, 0}` per arc slot, antisymmetric on edges.
/// `+1` marks `E₊`, `−1` marks `E₋`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orientation {
    sign: Vec<i8>,
    origin: String,
}

impl Orientation {
    /// Every edge unoriented, so `K ≡ 0`.
    pub fn empty(graph: &WeightedGraph) -> Self {
        Self {
            sign: vec![0; graph.arc_count()],
            origin: "empty".into(),
        }
    }

    /// Edges from `S_{r−1}` to `S_r` point outward (`E₊`); edges inside a
    /// sphere stay unoriented.
    pub fn spheres(graph: &WeightedGraph, root: VertexId) -> Result<Self> {
        if root >= graph.vertex_count() {
            return Err(Error::Orientation(format!("root {root} out of range")));
        }
        let hops = graph.hop_distances(root);
        if let Some(x) = hops.iter().position(Option::is_none) {
            return Err(Error::Orientation(format!(
                "vertex {x} is not reachable from root {root}"
            )));
        }
        let hops: Vec<usize> = hops.into_iter().map(Option::unwrap).collect();
        let mut sign = vec![0i8; graph.arc_count()];
        for x in graph.vertices() {
            for slot in graph.arc_range(x) {
                let y = graph.arc_target(slot);
                sign[slot] = match hops[y].cmp(&hops[x]) {
                    std::cmp::Ordering::Greater => 1,
                    std::cmp::Ordering::Less => -1,
                    std::cmp::Ordering::Equal => 0,
                };
            }
        }
        Ok(Self {
            sign,
            origin: format!("spheres around {root}"),
        })
    }

    /// `E₊` given as ordered pairs; their reverses form `E₋`.
    pub fn from_positive_arcs(
        graph: &WeightedGraph,
        arcs: &[(VertexId, VertexId)],
    ) -> Result<Self> {
        let mut sign = vec![0i8; graph.arc_count()];
        for &(x, y) in arcs {
            let (Some(fwd), Some(back)) = (graph.arc_slot(x, y), graph.arc_slot(y, x)) else {
                return Err(Error::Orientation(format!("({x}, {y}) is not an edge")));
            };
            if sign[fwd] == -1 || x == y {
                return Err(Error::Orientation(format!(
                    "({x}, {y}) is oriented both ways"
                )));
            }
            sign[fwd] = 1;
            sign[back] = -1;
        }
        Ok(Self {
            sign,
            origin: "custom".into(),
        })
    }

    pub fn reversed(&self) -> Self {
        Self {
            sign: self.sign.iter().map(|s| -s).collect(),
            origin: format!("reverse of {}", self.origin),
        }
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn sign(&self, slot: usize) -> i8 {
        self.sign[slot]
    }

    /// Signed edge list, each unordered edge once with `u < v`.
    pub fn to_document(&self, graph: &WeightedGraph) -> OrientationDocument {
        let edges = graph
            .vertices()
            .flat_map(|u| graph.arc_range(u).map(move |s| (u, s)))
            .filter(|&(u, s)| u < graph.arc_target(s))
            .map(|(u, s)| SignedEdge {
                u,
                v: graph.arc_target(s),
                sign: self.sign[s],
            })
            .collect();
        OrientationDocument {
            origin: self.origin.clone(),
            edges,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationDocument {
    pub origin: String,
    pub edges: Vec<SignedEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureField {
    /// `K(x)` for every vertex of the graph.
    pub curvature: Vec<f64>,
    pub vertex_set: Vec<VertexId>,
    /// `min_{x ∈ vertex_set} −K(x)`.
    pub k_lower: f64,
}

pub fn curvature(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    orientation: &Orientation,
    vertex_set: &[VertexId],
) -> CurvatureField {
    let curvature: Vec<f64> = graph
        .vertices()
        .map(|x| {
            let mut inward = 0.0;
            let mut outward = 0.0;
            for slot in graph.arc_range(x) {
                let mass = graph.arc_weight(slot) * metric.edge_dist(slot);
                match orientation.sign[slot] {
                    1 => outward += mass,
                    -1 => inward += mass,
                    _ => {}
                }
            }
            (inward - outward) / graph.m(x)
        })
        .collect();
    let k_lower = vertex_set
        .iter()
        .map(|&x| -curvature[x])
        .fold(f64::INFINITY, f64::min);
    CurvatureField {
        curvature,
        vertex_set: vertex_set.to_vec(),
        k_lower,
    }
}

/// Checks `|∂W| ≥ min_{x∈W}(−K(x))·m(W)` for every nonempty `W ⊆ U`, and
/// `α(U) ≥ k_lower(U)`. `K` always uses the full graph's incidence.
pub fn verify_curvature_bound(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    orientation: &Orientation,
    subset: &[VertexId],
    max_size: usize,
) -> Result<CertificateRecord> {
    let field = curvature(graph, metric, orientation, subset);
    if field.k_lower < 0.0 {
        return Ok(CertificateRecord::not_applicable(
            CLAIM_CURVATURE,
            format!("-K drops to {} on U", field.k_lower),
        )
        .with("k_lower", field.k_lower));
    }
    let costs = CutCosts::new(graph, metric);
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let neg_k: Vec<f64> = sorted.iter().map(|&x| -field.curvature[x]).collect();
    let mut checked = 0u64;
    let mut worst_slack = f64::INFINITY;
    let mut failures = 0u64;
    costs.for_each_subset(graph, &sorted, max_size, |mask, cut, volume| {
        let mut k = f64::INFINITY;
        let mut bits = mask;
        while bits != 0 {
            k = k.min(neg_k[bits.trailing_zeros() as usize]);
            bits &= bits - 1;
        }
        let slack = cut / volume - k;
        worst_slack = worst_slack.min(slack);
        if slack < -CHAIN_TOLERANCE {
            failures += 1;
        }
        checked += 1;
    })?;
    let exact = isoperimetry::cheeger_exact(graph, metric, &sorted, max_size)?;
    let record =
        CertificateRecord::inequality(CLAIM_CURVATURE, exact.alpha, field.k_lower, CHAIN_TOLERANCE)
            .with("orientation", orientation.origin())
            .with("optimal_W", &exact.optimal_set)
            .with("sets_checked", checked)
            .with("chain_failures", failures)
            .with("worst_chain_slack", worst_slack);
    Ok(if failures > 0 {
        record.fail("per-set chain violated")
    } else {
        record
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{GraphFamily, MeasureConvention, SphereLaw};
    use crate::graph::GraphBuilder;
    use crate::isoperimetry::DEFAULT_MAX_SIZE;
    use crate::metric::MetricRecipe;

    fn p3() -> WeightedGraph {
        let mut b = GraphBuilder::with_unit_measure(3);
        b.edge(0, 1, 1.0).edge(1, 2, 1.0);
        b.build()
    }

    #[test]
    fn sphere_orientation_on_p3() {
        let g = p3();
        let o = Orientation::spheres(&g, 0).unwrap();
        assert_eq!(o.sign(g.arc_slot(0, 1).unwrap()), 1);
        assert_eq!(o.sign(g.arc_slot(1, 2).unwrap()), 1);
        assert_eq!(o.sign(g.arc_slot(2, 1).unwrap()), -1);
        let doc = o.to_document(&g);
        assert!(doc.edges.iter().all(|e| e.sign == 1));
    }

    #[test]
    fn orientation_requires_connectivity() {
        let mut b = GraphBuilder::with_unit_measure(4);
        b.edge(0, 1, 1.0).edge(2, 3, 1.0);
        assert!(matches!(
            Orientation::spheres(&b.build(), 0),
            Err(Error::Orientation(_))
        ));
    }

    #[test]
    fn antitree_and_sphere_tree_orientations() {
        let anti = GraphFamily::Antitree {
            spheres: SphereLaw::Square,
            radius: 3,
            measure: MeasureConvention::Unit,
        }
        .generate()
        .unwrap();
        let o = Orientation::spheres(&anti, 0).unwrap();
        assert!(o.sign.iter().all(|&s| s != 0));

        let tree = GraphFamily::TreeWithSphereEdges {
            k: 2,
            radius: 2,
            measure: MeasureConvention::Unit,
        }
        .generate()
        .unwrap();
        let o = Orientation::spheres(&tree, 0).unwrap();
        assert_eq!(o.sign(tree.arc_slot(1, 2).unwrap()), 0);
        assert_eq!(o.sign(tree.arc_slot(3, 6).unwrap()), 0);
        assert_eq!(o.sign(tree.arc_slot(1, 3).unwrap()), 1);
    }

    #[test]
    fn regular_tree_interior_curvature() {
        for k in 2..=4 {
            let fam = GraphFamily::KRegularTree {
                k,
                radius: 3,
                measure: MeasureConvention::WeightedDegree,
            };
            let g = fam.generate().unwrap();
            let d = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
            let o = Orientation::spheres(&g, 0).unwrap();
            let interior = fam.interior(&g).unwrap();
            let field = curvature(&g, &d, &o, &interior);
            assert_eq!(field.curvature[0], -1.0);
            for &x in &interior[1..] {
                assert_eq!(field.curvature[x], (1.0 - k as f64) / (k as f64 + 1.0));
            }
            assert_eq!(field.k_lower, (k as f64 - 1.0) / (k as f64 + 1.0));
        }
    }

    #[test]
    fn reversing_negates_curvature() {
        let g = p3();
        let d = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
        let o = Orientation::spheres(&g, 0).unwrap();
        let all: Vec<_> = g.vertices().collect();
        let k = curvature(&g, &d, &o, &all).curvature;
        let r = curvature(&g, &d, &o.reversed(), &all).curvature;
        for (a, b) in k.iter().zip(&r) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn empty_orientation_gives_trivial_bound() {
        let g = p3();
        let d = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
        let rec =
            verify_curvature_bound(&g, &d, &Orientation::empty(&g), &[0, 1], DEFAULT_MAX_SIZE)
                .unwrap();
        assert!(rec.passed && rec.is_applicable());
        assert_eq!(rec.rhs, 0.0);
    }

    #[test]
    fn negative_curvature_is_not_applicable() {
        let g = p3();
        let d = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
        let o = Orientation::spheres(&g, 0).unwrap();
        // Vertex 2 has only an inward edge, so −K(2) < 0.
        let rec = verify_curvature_bound(&g, &d, &o, &[1, 2], DEFAULT_MAX_SIZE).unwrap();
        assert!(!rec.is_applicable());
    }

    #[test]
    fn custom_orientation_validation() {
        let g = p3();
        assert!(Orientation::from_positive_arcs(&g, &[(0, 2)]).is_err());
        assert!(Orientation::from_positive_arcs(&g, &[(0, 1), (1, 0)]).is_err());
        let o = Orientation::from_positive_arcs(&g, &[(1, 0)]).unwrap();
        assert_eq!(o.sign(g.arc_slot(0, 1).unwrap()), -1);
    }
}
