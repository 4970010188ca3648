//! Named graph families and their finite truncations.
//!
//! Family graphs are rooted at vertex 0 and numbered breadth-first, so the
//! radius-`R` truncation is the induced subgraph of any larger truncation on
//! its first `|B_R|` vertices.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, VertexId, WeightedGraph};

/// How vertex measures are assigned after the edges are built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureConvention {
    Unit,
    /// `m = n`, computed on the truncated graph.
    WeightedDegree,
    /// Constant measure.
    Custom(f64),
}

/// Sphere sizes `#S_j` for antitrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereLaw {
    /// `#S_j = (j + 1)^2`.
    Square,
    /// `#S_j = (j + 1)^p`.
    Power(u32),
    /// Explicit sizes starting with the root sphere, which must have size 1.
    Explicit(Vec<usize>),
}

impl SphereLaw {
    pub fn size(&self, j: usize) -> usize {
        match self {
            SphereLaw::Square => (j + 1).pow(2),
            SphereLaw::Power(p) => (j + 1).pow(*p),
            SphereLaw::Explicit(sizes) => sizes[j],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomMeasure {
    Unit,
    WeightedDegree,
    Range(f64, f64),
}

/// Parameters of the seeded random family: a random spanning tree plus
/// independent extra edges, so the result is always connected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub vertices: usize,
    pub edge_probability: f64,
    pub weight_range: (f64, f64),
    pub measure: RandomMeasure,
    #[serde(default)]
    pub potential_range: Option<(f64, f64)>,
    /// Fraction of vertices that receive a nonzero potential.
    #[serde(default = "default_potential_density")]
    pub potential_density: f64,
    pub seed: u64,
}

fn default_potential_density() -> f64 {
    1.0
}

impl RandomSpec {
    pub fn new(vertices: usize, seed: u64) -> Self {
        Self {
            vertices,
            edge_probability: 0.3,
            weight_range: (0.1, 2.0),
            measure: RandomMeasure::Range(0.1, 3.0),
            potential_range: None,
            potential_density: 1.0,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    KRegularTree,
    Antitree,
    TreeWithSphereEdges,
    Path,
    RandomWeighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphFamily {
    /// Rooted tree in which every vertex has `k` forward neighbors.
    KRegularTree {
        k: usize,
        radius: usize,
        measure: MeasureConvention,
    },
    /// Complete bipartite joins between consecutive spheres, none inside a sphere.
    Antitree {
        spheres: SphereLaw,
        radius: usize,
        measure: MeasureConvention,
    },
    /// `k`-regular tree plus unit edges between all vertices of equal depth.
    TreeWithSphereEdges {
        k: usize,
        radius: usize,
        measure: MeasureConvention,
    },
    /// Half-line rooted at one end, truncated after `radius` edges.
    Path {
        radius: usize,
        measure: MeasureConvention,
    },
    RandomWeighted(RandomSpec),
}

impl GraphFamily {
    pub fn kind(&self) -> FamilyKind {
        match self {
            GraphFamily::KRegularTree { .. } => FamilyKind::KRegularTree,
            GraphFamily::Antitree { .. } => FamilyKind::Antitree,
            GraphFamily::TreeWithSphereEdges { .. } => FamilyKind::TreeWithSphereEdges,
            GraphFamily::Path { .. } => FamilyKind::Path,
            GraphFamily::RandomWeighted(_) => FamilyKind::RandomWeighted,
        }
    }

    /// Truncation radius, `None` for the random family.
    pub fn radius(&self) -> Option<usize> {
        match self {
            GraphFamily::KRegularTree { radius, .. }
            | GraphFamily::Antitree { radius, .. }
            | GraphFamily::TreeWithSphereEdges { radius, .. }
            | GraphFamily::Path { radius, .. } => Some(*radius),
            GraphFamily::RandomWeighted(_) => None,
        }
    }

    /// The same family truncated at a different radius.
    pub fn with_radius(&self, r: usize) -> Self {
        let mut out = self.clone();
        match &mut out {
            GraphFamily::KRegularTree { radius, .. }
            | GraphFamily::Antitree { radius, .. }
            | GraphFamily::TreeWithSphereEdges { radius, .. }
            | GraphFamily::Path { radius, .. } => *radius = r,
            GraphFamily::RandomWeighted(_) => {}
        }
        out
    }

    /// Sizes of the spheres `S_0, …, S_R` of the truncation.
    pub fn sphere_sizes(&self) -> Option<Vec<usize>> {
        let radius = self.radius()?;
        Some(
            (0..=radius)
                .map(|j| match self {
                    GraphFamily::KRegularTree { k, .. }
                    | GraphFamily::TreeWithSphereEdges { k, .. } => k.pow(j as u32),
                    GraphFamily::Antitree { spheres, .. } => spheres.size(j),
                    GraphFamily::Path { .. } => 1,
                    GraphFamily::RandomWeighted(_) => unreachable!(),
                })
                .collect(),
        )
    }

    pub fn check(&self) -> Result<()> {
        if let Some(radius) = self.radius() {
            if radius < 1 {
                return Err(Error::parameter("radius", "must be at least 1"));
            }
        }
        match self {
            GraphFamily::KRegularTree { k, measure, .. }
            | GraphFamily::TreeWithSphereEdges { k, measure, .. } => {
                if *k < 2 {
                    return Err(Error::parameter(
                        "k",
                        format!("must be at least 2, got {k}"),
                    ));
                }
                check_measure(measure)
            }
            GraphFamily::Antitree {
                spheres,
                radius,
                measure,
            } => {
                if let SphereLaw::Explicit(sizes) = spheres {
                    if sizes.len() <= *radius {
                        return Err(Error::parameter(
                            "spheres",
                            format!("need {} sizes, got {}", radius + 1, sizes.len()),
                        ));
                    }
                    if sizes.first() != Some(&1) {
                        return Err(Error::parameter("spheres", "root sphere must have size 1"));
                    }
                    if sizes.contains(&0) {
                        return Err(Error::parameter(
                            "spheres",
                            "sphere sizes must be at least 1",
                        ));
                    }
                }
                if let SphereLaw::Power(0) = spheres {
                    return Err(Error::parameter("spheres", "exponent must be positive"));
                }
                check_measure(measure)
            }
            GraphFamily::Path { measure, .. } => check_measure(measure),
            GraphFamily::RandomWeighted(spec) => {
                if spec.vertices < 2 {
                    return Err(Error::parameter("vertices", "must be at least 2"));
                }
                if !(0.0..=1.0).contains(&spec.edge_probability) {
                    return Err(Error::parameter("edge_probability", "must lie in [0, 1]"));
                }
                check_range("weight_range", spec.weight_range)?;
                if let RandomMeasure::Range(lo, hi) = spec.measure {
                    check_range("measure", (lo, hi))?;
                }
                if let Some(range) = spec.potential_range {
                    if !(range.0 >= 0.0 && range.0 <= range.1) {
                        return Err(Error::parameter(
                            "potential_range",
                            "must satisfy 0 <= lo <= hi",
                        ));
                    }
                }
                if !(0.0..=1.0).contains(&spec.potential_density) {
                    return Err(Error::parameter("potential_density", "must lie in [0, 1]"));
                }
                Ok(())
            }
        }
    }

    /// Builds the finite truncation.
    pub fn generate(&self) -> Result<WeightedGraph> {
        self.check()?;
        let (builder, measure) = match self {
            GraphFamily::KRegularTree { k, measure, .. } => (self.tree(*k, false), *measure),
            GraphFamily::TreeWithSphereEdges { k, measure, .. } => (self.tree(*k, true), *measure),
            GraphFamily::Antitree { measure, .. } => (self.antitree(), *measure),
            GraphFamily::Path { radius, measure } => {
                let mut b = GraphBuilder::with_unit_measure(radius + 1);
                for i in 0..*radius {
                    b.edge(i, i + 1, 1.0);
                }
                (b, *measure)
            }
            GraphFamily::RandomWeighted(spec) => return Ok(random_weighted(spec)),
        };
        let graph = builder.build();
        Ok(match measure {
            MeasureConvention::Unit => graph,
            MeasureConvention::WeightedDegree => graph.with_weighted_degree_measure(),
            MeasureConvention::Custom(v) => graph.with_measure(vec![v; graph.vertex_count()]),
        })
    }

    fn tree(&self, k: usize, sphere_edges: bool) -> GraphBuilder {
        let sizes = self.sphere_sizes().unwrap();
        let total = sizes.iter().sum();
        let mut b = GraphBuilder::with_unit_measure(total);
        let mut start = 0;
        for (j, &size) in sizes.iter().enumerate() {
            let next = start + size;
            if j + 1 < sizes.len() {
                for i in 0..size {
                    for child in 0..k {
                        b.edge(start + i, next + i * k + child, 1.0);
                    }
                }
            }
            if sphere_edges {
                for x in start..next {
                    for y in x + 1..next {
                        b.edge(x, y, 1.0);
                    }
                }
            }
            start = next;
        }
        b
    }

    fn antitree(&self) -> GraphBuilder {
        let sizes = self.sphere_sizes().unwrap();
        let total = sizes.iter().sum();
        let mut b = GraphBuilder::with_unit_measure(total);
        let mut start = 0;
        for pair in sizes.windows(2) {
            let next = start + pair[0];
            for x in start..next {
                for y in next..next + pair[1] {
                    b.edge(x, y, 1.0);
                }
            }
            start = next;
        }
        b
    }

    /// Vertices at hop distance `< R` from the root: exactly those whose full
    /// neighborhood is present in the truncation.
    pub fn interior(&self, graph: &WeightedGraph) -> Result<Vec<VertexId>> {
        let radius = self.radius().ok_or_else(|| {
            Error::Unsupported("the random family has no truncation interior".into())
        })?;
        let expected: usize = self.sphere_sizes().unwrap().iter().sum();
        if graph.vertex_count() != expected {
            return Err(Error::Unsupported(format!(
                "graph has {} vertices but the family truncation has {expected}",
                graph.vertex_count()
            )));
        }
        Ok(graph
            .hop_distances(0)
            .iter()
            .enumerate()
            .filter(|(_, h)| matches!(h, Some(h) if *h < radius))
            .map(|(x, _)| x)
            .collect())
    }
}

fn check_measure(measure: &MeasureConvention) -> Result<()> {
    match measure {
        MeasureConvention::Custom(v) if !(*v > 0.0 && v.is_finite()) => Err(Error::parameter(
            "measure",
            format!("must be positive, got {v}"),
        )),
        _ => Ok(()),
    }
}

fn check_range(field: &'static str, (lo, hi): (f64, f64)) -> Result<()> {
    if lo > 0.0 && lo <= hi && hi.is_finite() {
        Ok(())
    } else {
        Err(Error::parameter(
            field,
            format!("need 0 < lo <= hi, got ({lo}, {hi})"),
        ))
    }
}

fn sample(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

fn random_weighted(spec: &RandomSpec) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.vertices;
    let mut b = GraphBuilder::with_unit_measure(n);
    let mut adjacent = vec![vec![false; n]; n];
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let w = sample(&mut rng, spec.weight_range);
        b.edge(j, i, w);
        adjacent[i][j] = true;
        adjacent[j][i] = true;
    }
    for i in 0..n {
        for j in i + 1..n {
            if !adjacent[i][j] && rng.gen_bool(spec.edge_probability) {
                let w = sample(&mut rng, spec.weight_range);
                b.edge(i, j, w);
            }
        }
    }
    if let Some(range) = spec.potential_range {
        let c = (0..n)
            .map(|_| {
                if rng.gen_bool(spec.potential_density) {
                    sample(&mut rng, range)
                } else {
                    0.0
                }
            })
            .collect();
        b.potential(c);
    }
    let graph = b.build();
    match spec.measure {
        RandomMeasure::Unit => graph,
        RandomMeasure::WeightedDegree => graph.with_weighted_degree_measure(),
        RandomMeasure::Range(lo, hi) => {
            let m = (0..n).map(|_| sample(&mut rng, (lo, hi))).collect();
            graph.with_measure(m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(k: usize, radius: usize) -> GraphFamily {
        GraphFamily::KRegularTree {
            k,
            radius,
            measure: MeasureConvention::Unit,
        }
    }

    #[test]
    fn binary_tree_counts() {
        let g = tree(2, 2).generate().unwrap();
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.degree_count(0), 2);
        assert_eq!(g.degree_count(1), 3);
    }

    #[test]
    fn square_antitree_counts() {
        let fam = GraphFamily::Antitree {
            spheres: SphereLaw::Square,
            radius: 2,
            measure: MeasureConvention::Unit,
        };
        assert_eq!(fam.sphere_sizes().unwrap(), vec![1, 4, 9]);
        let g = fam.generate().unwrap();
        assert_eq!(g.vertex_count(), 14);
        assert_eq!(g.edge_count(), 4 + 36);
        // no edges inside a sphere
        assert_eq!(g.b(1, 2), 0.0);
    }

    #[test]
    fn tree_with_sphere_edges_counts() {
        let fam = GraphFamily::TreeWithSphereEdges {
            k: 2,
            radius: 2,
            measure: MeasureConvention::Unit,
        };
        let g = fam.generate().unwrap();
        assert_eq!(g.edge_count(), 6 + 6 + 1);
        assert_eq!(g.b(1, 2), 1.0);
        assert_eq!(g.b(3, 6), 1.0);
    }

    #[test]
    fn interiors() {
        let fam = tree(2, 2);
        let g = fam.generate().unwrap();
        assert_eq!(fam.interior(&g).unwrap(), vec![0, 1, 2]);

        let anti = GraphFamily::Antitree {
            spheres: SphereLaw::Square,
            radius: 2,
            measure: MeasureConvention::Unit,
        };
        let g = anti.generate().unwrap();
        assert_eq!(anti.interior(&g).unwrap(), vec![0, 1, 2, 3, 4]);

        let path = GraphFamily::Path {
            radius: 4,
            measure: MeasureConvention::Unit,
        };
        let g = path.generate().unwrap();
        assert_eq!(path.interior(&g).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn interior_rejects_foreign_graphs() {
        let fam = tree(2, 2);
        let other = tree(2, 3).generate().unwrap();
        assert!(matches!(fam.interior(&other), Err(Error::Unsupported(_))));
        let random = GraphFamily::RandomWeighted(RandomSpec::new(5, 1));
        let g = random.generate().unwrap();
        assert!(matches!(random.interior(&g), Err(Error::Unsupported(_))));
    }

    #[test]
    fn parameter_errors_name_the_field() {
        let err = tree(1, 3).generate().unwrap_err();
        assert!(matches!(err, Error::Parameter { field: "k", .. }));
        let err = tree(2, 0).generate().unwrap_err();
        assert!(matches!(
            err,
            Error::Parameter {
                field: "radius",
                ..
            }
        ));
        let err = GraphFamily::Antitree {
            spheres: SphereLaw::Explicit(vec![1, 0, 3]),
            radius: 2,
            measure: MeasureConvention::Unit,
        }
        .generate()
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Parameter {
                field: "spheres",
                ..
            }
        ));
    }

    #[test]
    fn weighted_degree_measure_uses_truncated_degrees() {
        let g = GraphFamily::KRegularTree {
            k: 3,
            radius: 2,
            measure: MeasureConvention::WeightedDegree,
        }
        .generate()
        .unwrap();
        assert_eq!(g.m(0), 3.0);
        assert_eq!(g.m(1), 4.0);
        assert_eq!(g.m(12), 1.0);
    }

    #[test]
    fn random_family_is_seeded_and_valid() {
        let mut spec = RandomSpec::new(12, 42);
        spec.potential_range = Some((0.0, 1.0));
        let fam = GraphFamily::RandomWeighted(spec);
        let a = fam.generate().unwrap();
        let b = fam.generate().unwrap();
        assert_eq!(a, b);
        assert!(a.validate().is_valid());
        assert!(a.is_connected());
    }

    #[test]
    fn families_validate() {
        let families = [
            tree(3, 3),
            GraphFamily::TreeWithSphereEdges {
                k: 2,
                radius: 4,
                measure: MeasureConvention::WeightedDegree,
            },
            GraphFamily::Antitree {
                spheres: SphereLaw::Power(3),
                radius: 3,
                measure: MeasureConvention::Custom(0.5),
            },
            GraphFamily::Path {
                radius: 1,
                measure: MeasureConvention::Unit,
            },
        ];
        for fam in &families {
            assert!(fam.generate().unwrap().validate().is_valid(), "{fam:?}");
        }
    }

    #[test]
    fn truncations_nest() {
        for fam in [
            tree(2, 5),
            GraphFamily::Antitree {
                spheres: SphereLaw::Square,
                radius: 4,
                measure: MeasureConvention::Unit,
            },
            GraphFamily::TreeWithSphereEdges {
                k: 3,
                radius: 3,
                measure: MeasureConvention::Unit,
            },
        ] {
            let big = fam.generate().unwrap();
            let small_fam = fam.with_radius(fam.radius().unwrap() - 2);
            let small = small_fam.generate().unwrap();
            let cut = small.vertex_count();
            for x in 0..cut {
                for y in 0..cut {
                    assert_eq!(small.b(x, y), big.b(x, y), "{fam:?} ({x},{y})");
                }
            }
        }
    }
}
