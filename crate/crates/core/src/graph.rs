//! Weighted graphs over a discrete measure space.
//!
//! A [`WeightedGraph`] stores the vertex measure `m`, an optional potential `c`
//! and the edge weights `b` in compressed sparse row form. Rows are sorted by
//! target so that `(x, y)` lookups are a binary search. The weighted degree
//! `n(x) = Σ_y b(x, y)` is computed once at construction.
//!
//! Construction never rejects a graph; [`WeightedGraph::validate`] reports
//! every violated standing assumption instead. Use
//! [`GraphBuilder::build_validated`] when an invalid graph is an error.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    measure: Vec<f64>,
    potential: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Vec<f64>,
    degree: Vec<f64>,
    labels: BTreeMap<VertexId, String>,
}

/// Accumulates arcs before freezing them into a [`WeightedGraph`].
///
/// Repeated arcs between the same ordered pair are summed. Zero weights are
/// dropped, so they never create a neighbor relation.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    measure: Vec<f64>,
    potential: Vec<f64>,
    arcs: BTreeMap<(VertexId, VertexId), f64>,
    labels: BTreeMap<VertexId, String>,
}

impl GraphBuilder {
    pub fn new(measure: Vec<f64>) -> Self {
        let n = measure.len();
        Self {
            measure,
            potential: vec![0.0; n],
            arcs: BTreeMap::new(),
            labels: BTreeMap::new(),
        }
    }

    pub fn with_unit_measure(vertex_count: usize) -> Self {
        Self::new(vec![1.0; vertex_count])
    }

    pub fn vertex_count(&self) -> usize {
        self.measure.len()
    }

    /// Adds `w` to both `b(u, v)` and `b(v, u)`.
    pub fn edge(&mut self, u: VertexId, v: VertexId, w: f64) -> &mut Self {
        self.arc(u, v, w);
        if u != v {
            self.arc(v, u, w);
        }
        self
    }

    /// Adds `w` to `b(u, v)` only. Used to express (and detect) asymmetric input.
    pub fn arc(&mut self, u: VertexId, v: VertexId, w: f64) -> &mut Self {
        assert!(
            u < self.vertex_count() && v < self.vertex_count(),
            "arc ({u}, {v}) out of range"
        );
        *self.arcs.entry((u, v)).or_insert(0.0) += w;
        self
    }

    pub fn potential(&mut self, c: Vec<f64>) -> &mut Self {
        assert_eq!(c.len(), self.vertex_count(), "potential length mismatch");
        self.potential = c;
        self
    }

    pub fn label(&mut self, v: VertexId, label: impl Into<String>) -> &mut Self {
        self.labels.insert(v, label.into());
        self
    }

    pub fn build(&self) -> WeightedGraph {
        let n = self.vertex_count();
        let mut offsets = vec![0usize; n + 1];
        let mut targets = Vec::with_capacity(self.arcs.len());
        let mut weights = Vec::with_capacity(self.arcs.len());
        // BTreeMap iteration is sorted by (source, target), which is CSR order.
        for (&(u, v), &w) in &self.arcs {
            if w == 0.0 {
                continue;
            }
            offsets[u + 1] += 1;
            targets.push(v);
            weights.push(w);
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        WeightedGraph::from_csr(
            self.measure.clone(),
            self.potential.clone(),
            offsets,
            targets,
            weights,
            self.labels.clone(),
        )
    }

    pub fn build_validated(&self) -> Result<WeightedGraph> {
        let graph = self.build();
        let report = graph.validate();
        if report.is_valid() {
            Ok(graph)
        } else {
            Err(Error::Argument(format!("invalid graph: {report}")))
        }
    }
}

impl WeightedGraph {
    fn from_csr(
        measure: Vec<f64>,
        potential: Vec<f64>,
        offsets: Vec<usize>,
        targets: Vec<VertexId>,
        weights: Vec<f64>,
        labels: BTreeMap<VertexId, String>,
    ) -> Self {
        let degree = (0..measure.len())
            .map(|x| weights[offsets[x]..offsets[x + 1]].iter().sum())
            .collect();
        Self {
            measure,
            potential,
            offsets,
            targets,
            weights,
            degree,
            labels,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.measure.len()
    }

    /// Number of stored arcs (each undirected edge counts twice).
    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    /// Number of unordered neighbor pairs `{x, y}`, `x != y`.
    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn vertices(&self) -> Range<VertexId> {
        0..self.vertex_count()
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn m(&self, x: VertexId) -> f64 {
        self.measure[x]
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn c(&self, x: VertexId) -> f64 {
        self.potential[x]
    }

    pub fn has_potential(&self) -> bool {
        self.potential.iter().any(|&c| c != 0.0)
    }

    /// Weighted degree `n(x) = Σ_y b(x, y)`.
    pub fn n(&self, x: VertexId) -> f64 {
        self.degree[x]
    }

    pub fn weighted_degrees(&self) -> &[f64] {
        &self.degree
    }

    pub fn label(&self, x: VertexId) -> Option<&str> {
        self.labels.get(&x).map(String::as_str)
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, String> {
        &self.labels
    }

    /// CSR slot range of the arcs leaving `x`.
    pub fn arc_range(&self, x: VertexId) -> Range<usize> {
        self.offsets[x]..self.offsets[x + 1]
    }

    pub fn arc_target(&self, slot: usize) -> VertexId {
        self.targets[slot]
    }

    pub fn arc_weight(&self, slot: usize) -> f64 {
        self.weights[slot]
    }

    /// Slot of the arc `(x, y)`, if present.
    pub fn arc_slot(&self, x: VertexId, y: VertexId) -> Option<usize> {
        let range = self.arc_range(x);
        self.targets[range.clone()]
            .binary_search(&y)
            .ok()
            .map(|i| range.start + i)
    }

    /// `(y, b(x, y))` for every `y` with `b(x, y) > 0`.
    pub fn neighbors(&self, x: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.arc_range(x)
            .map(move |s| (self.targets[s], self.weights[s]))
    }

    pub fn degree_count(&self, x: VertexId) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    pub fn b(&self, x: VertexId, y: VertexId) -> f64 {
        self.arc_slot(x, y).map_or(0.0, |s| self.weights[s])
    }

    /// Unordered edges `(u, v, b(u, v))` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Same edges, new measure. Weighted degrees are unchanged.
    pub fn with_measure(&self, measure: Vec<f64>) -> Self {
        assert_eq!(
            measure.len(),
            self.vertex_count(),
            "measure length mismatch"
        );
        Self {
            measure,
            ..self.clone()
        }
    }

    pub fn with_potential(&self, potential: Vec<f64>) -> Self {
        assert_eq!(
            potential.len(),
            self.vertex_count(),
            "potential length mismatch"
        );
        Self {
            potential,
            ..self.clone()
        }
    }

    /// The normalized-Laplacian measure convention `m = n`.
    pub fn with_weighted_degree_measure(&self) -> Self {
        self.with_measure(self.degree.clone())
    }

    /// `m(W)`.
    pub fn volume(&self, set: &[VertexId]) -> f64 {
        set.iter().map(|&x| self.measure[x]).sum()
    }

    /// `m ≥ n` at every vertex.
    pub fn measure_dominates_degree(&self) -> bool {
        self.vertices().all(|x| self.measure[x] >= self.degree[x])
    }

    /// Breadth-first hop distances from `root`; `None` for unreachable vertices.
    pub fn hop_distances(&self, root: VertexId) -> Vec<Option<usize>> {
        let mut hops = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        hops[root] = Some(0);
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            let next = hops[x].unwrap() + 1;
            for (y, _) in self.neighbors(x) {
                if hops[y].is_none() {
                    hops[y] = Some(next);
                    queue.push_back(y);
                }
            }
        }
        hops
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.hop_distances(0).iter().all(Option::is_some)
    }

    /// Reports every violated standing assumption. Empty iff the graph is valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for x in self.vertices() {
            let m = self.measure[x];
            if !(m > 0.0 && m.is_finite()) {
                violations.push(Violation::NonpositiveMeasure { vertex: x, m });
            }
            let c = self.potential[x];
            if !(c >= 0.0 && c.is_finite()) {
                violations.push(Violation::NegativePotential { vertex: x, c });
            }
            let mut has_neighbor = false;
            for (y, w) in self.neighbors(x) {
                if !(w >= 0.0 && w.is_finite()) {
                    violations.push(Violation::InvalidWeight { u: x, v: y, b: w });
                }
                if x == y {
                    violations.push(Violation::NonzeroDiagonal { vertex: x, b: w });
                    continue;
                }
                has_neighbor = true;
                let back = self.b(y, x);
                // Each asymmetric pair is reported once, from its smaller end,
                // unless the reverse arc is missing entirely.
                if back != w && (x < y || back == 0.0) {
                    violations.push(Violation::Asymmetry {
                        u: x,
                        v: y,
                        forward: w,
                        backward: back,
                    });
                }
            }
            if !has_neighbor {
                violations.push(Violation::IsolatedVertex { vertex: x });
            }
        }
        ValidationReport { violations }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Asymmetry {
        u: VertexId,
        v: VertexId,
        forward: f64,
        backward: f64,
    },
    NonzeroDiagonal {
        vertex: VertexId,
        b: f64,
    },
    NonpositiveMeasure {
        vertex: VertexId,
        m: f64,
    },
    NegativePotential {
        vertex: VertexId,
        c: f64,
    },
    InvalidWeight {
        u: VertexId,
        v: VertexId,
        b: f64,
    },
    IsolatedVertex {
        vertex: VertexId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Asymmetry {
                u,
                v,
                forward,
                backward,
            } => write!(f, "asymmetry at ({u}, {v}): {forward} vs {backward}"),
            Violation::NonzeroDiagonal { vertex, b } => {
                write!(f, "nonzero diagonal at {vertex}: {b}")
            }
            Violation::NonpositiveMeasure { vertex, m } => {
                write!(f, "nonpositive measure at {vertex}: {m}")
            }
            Violation::NegativePotential { vertex, c } => {
                write!(f, "negative potential at {vertex}: {c}")
            }
            Violation::InvalidWeight { u, v, b } => write!(f, "invalid weight at ({u}, {v}): {b}"),
            Violation::IsolatedVertex { vertex } => write!(f, "no neighbor at {vertex}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

// JSON interchange.

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: i64,
    pub m: f64,
    #[serde(default)]
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: i64,
    pub v: i64,
    pub b: f64,
}

/// `{"vertices":[{"id","m","c","label"?}],"edges":[{"u","v","b"}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
}

impl GraphDocument {
    /// Maps ids to dense indices in listing order and symmetrizes the edges.
    pub fn into_graph(self) -> Result<WeightedGraph> {
        let mut index = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.id, i).is_some() {
                return Err(Error::Parse(format!("duplicate vertex id {}", v.id)));
            }
        }
        let lookup = |id: i64| {
            index
                .get(&id)
                .copied()
                .ok_or_else(|| Error::Parse(format!("edge references unknown vertex {id}")))
        };
        let mut builder = GraphBuilder::new(self.vertices.iter().map(|v| v.m).collect());
        builder.potential(self.vertices.iter().map(|v| v.c).collect());
        for (i, v) in self.vertices.iter().enumerate() {
            if let Some(label) = &v.label {
                builder.label(i, label.clone());
            }
        }
        for e in &self.edges {
            builder.edge(lookup(e.u)?, lookup(e.v)?, e.b);
        }
        Ok(builder.build())
    }

    pub fn from_graph(graph: &WeightedGraph) -> Self {
        let vertices = graph
            .vertices()
            .map(|x| VertexRecord {
                id: x as i64,
                m: graph.m(x),
                c: graph.c(x),
                label: graph.label(x).map(str::to_owned),
            })
            .collect();
        let edges = graph
            .edges()
            .map(|(u, v, b)| EdgeRecord {
                u: u as i64,
                v: v as i64,
                b,
            })
            .collect();
        Self { vertices, edges }
    }
}

impl WeightedGraph {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_graph()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphDocument::from_graph(self))
            .expect("graph serialization is infallible")
    }
}
