//! Finite-radius exponential volume growth
//! `inf_x log(m(B_r(x)) / m(B_1(x))) / r` over metric balls.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::CertificateRecord;
use crate::error::{Error, Result};
use crate::family::GraphFamily;
use crate::graph::{VertexId, WeightedGraph};
use crate::metric::MetricAssignment;

pub const CLAIM_GROWTH: &str = "2*alpha <= mu";
pub const DEFAULT_GROWTH_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub r: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub per_radius: Vec<GrowthPoint>,
    /// Value at the largest radius. Finite data cannot bound the liminf from
    /// either side, so the whole sequence is kept alongside it.
    pub mu_hat: f64,
    pub center_set: Vec<VertexId>,
}

/// `(d, m)` sorted by distance with prefix sums of the measure.
struct BallProfile {
    dist: Vec<f64>,
    cumulative: Vec<f64>,
}

impl BallProfile {
    fn new(graph: &WeightedGraph, metric: &MetricAssignment, center: VertexId) -> Self {
        let mut pairs: Vec<(f64, f64)> = metric
            .distances_from(graph, center)
            .into_iter()
            .zip(graph.measure().iter().copied())
            .filter(|(d, _)| d.is_finite())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut total = 0.0;
        let cumulative = pairs
            .iter()
            .map(|&(_, m)| {
                total += m;
                total
            })
            .collect();
        Self {
            dist: pairs.into_iter().map(|(d, _)| d).collect(),
            cumulative,
        }
    }

    /// `m(B_r)`; the center itself is always inside.
    fn volume(&self, r: f64) -> f64 {
        let limit = r * (1.0 + 1e-12);
        let count = self.dist.partition_point(|&d| d <= limit);
        self.cumulative[count.max(1) - 1]
    }
}

pub fn volume_growth(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    centers: &[VertexId],
    radii: &[f64],
) -> Result<GrowthEstimate> {
    if centers.is_empty() {
        return Err(Error::Argument("center set is empty".into()));
    }
    if let Some(&x) = centers.iter().find(|&&x| x >= graph.vertex_count()) {
        return Err(Error::Argument(format!("center {x} out of range")));
    }
    if radii.is_empty() {
        return Err(Error::Argument("no radii given".into()));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument(
            "radii must be positive and strictly increasing".into(),
        ));
    }
    let profiles: Vec<BallProfile> = centers
        .par_iter()
        .map(|&x| BallProfile::new(graph, metric, x))
        .collect();
    let per_radius: Vec<GrowthPoint> = radii
        .iter()
        .map(|&r| GrowthPoint {
            r,
            value: profiles
                .iter()
                .map(|p| (p.volume(r) / p.volume(1.0)).ln() / r)
                .fold(f64::INFINITY, f64::min),
        })
        .collect();
    Ok(GrowthEstimate {
        mu_hat: per_radius.last().unwrap().value,
        per_radius,
        center_set: centers.to_vec(),
    })
}

/// Consistency check `2·alpha_lower ≤ μ̂ + slack` around the root.
///
/// For family truncations only radii whose root ball stays within the
/// interior are used, since truncated leaves carry the wrong measure and
/// degree. The hypothesis that the metric closure coincides with the maximal
/// form domain is assumed, not checked.
pub fn verify_growth_bound(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    family: Option<&GraphFamily>,
    alpha_lower: f64,
    radii: &[f64],
    slack: f64,
) -> Result<CertificateRecord> {
    let interior = family.map(|f| f.interior(graph)).transpose();
    let (kept, dropped) = match interior {
        Ok(Some(interior)) => {
            let mut inside = vec![false; graph.vertex_count()];
            interior.iter().for_each(|&x| inside[x] = true);
            let reach = metric
                .distances_from(graph, 0)
                .into_iter()
                .enumerate()
                .filter(|&(x, _)| !inside[x])
                .map(|(_, d)| d)
                .fold(f64::INFINITY, f64::min);
            radii.iter().partition::<Vec<f64>, _>(|&&r| r < reach)
        }
        Ok(None) | Err(Error::Unsupported(_)) => (radii.to_vec(), Vec::new()),
        Err(e) => return Err(e),
    };
    if kept.is_empty() {
        return Ok(CertificateRecord::not_applicable(
            CLAIM_GROWTH,
            "no radius keeps the ball interior",
        )
        .with("dropped_radii", dropped));
    }
    let estimate = volume_growth(graph, metric, &[0], &kept)?;
    Ok(CertificateRecord::inequality(
        CLAIM_GROWTH,
        estimate.mu_hat + slack,
        2.0 * alpha_lower,
        0.0,
    )
    .with("mu_hat", estimate.mu_hat)
    .with("alpha_lower", alpha_lower)
    .with("slack", slack)
    .with("per_radius", &estimate.per_radius)
    .with("dropped_radii", dropped)
    .with("family", family.map(GraphFamily::kind))
    .with(
        "assumption",
        "form domain is maximal (locally finite, complete path metric)",
    )
    .with("scope", "finite-radius consistency check"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::MeasureConvention;
    use crate::graph::GraphBuilder;
    use crate::metric::MetricRecipe;

    fn binary_tree(radius: usize, measure: MeasureConvention) -> (GraphFamily, WeightedGraph) {
        let fam = GraphFamily::KRegularTree {
            k: 2,
            radius,
            measure,
        };
        let g = fam.generate().unwrap();
        (fam, g)
    }

    #[test]
    fn isolated_center_gives_zero() {
        let g = GraphBuilder::with_unit_measure(1).build();
        let d = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
        let est = volume_growth(&g, &d, &[0], &[1.0, 2.0, 5.0]).unwrap();
        assert!(est.per_radius.iter().all(|p| p.value == 0.0));
    }

    #[test]
    fn binary_tree_canonical_ball_counts() {
        let (_, g) = binary_tree(8, MeasureConvention::Unit);
        let d = MetricAssignment::build(&g, MetricRecipe::Canonical).unwrap();
        let radii = [1.3, 2.1, 2.9, 3.7, 4.5];
        let est = volume_growth(&g, &d, &[0], &radii).unwrap();
        let ball1 = 2f64.powi((3f64.sqrt()).floor() as i32 + 1) - 1.0;
        for p in &est.per_radius {
            let depth = (p.r * 3f64.sqrt()).floor() as i32;
            let expected = ((2f64.powi(depth + 1) - 1.0) / ball1).ln() / p.r;
            assert!((p.value - expected).abs() < 1e-12, "r = {}", p.r);
        }
    }

    #[test]
    fn scaling_lengths_rescales_values() {
        let (_, g) = binary_tree(6, MeasureConvention::WeightedDegree);
        let d = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
        // With unit edges B_1 and B_{1/s} agree for s in (1/2, 1].
        let s = 0.8;
        let base = volume_growth(&g, &d, &[0, 3], &[1.0, 2.0, 3.0]).unwrap();
        let scaled = volume_growth(&g, &d.scaled(s), &[0, 3], &[s, 2.0 * s, 3.0 * s]).unwrap();
        for (a, b) in base.per_radius.iter().zip(&scaled.per_radius) {
            assert!((b.value - a.value / s).abs() < 1e-12);
        }
    }

    #[test]
    fn radii_must_increase() {
        let (_, g) = binary_tree(3, MeasureConvention::Unit);
        let d = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
        assert!(volume_growth(&g, &d, &[0], &[2.0, 1.0]).is_err());
        assert!(volume_growth(&g, &d, &[], &[1.0]).is_err());
    }

    #[test]
    fn larger_center_sets_lower_the_infimum() {
        let (_, g) = binary_tree(6, MeasureConvention::WeightedDegree);
        let d = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
        let one = volume_growth(&g, &d, &[0], &[2.0, 4.0]).unwrap();
        let many = volume_growth(&g, &d, &[0, 1, 5, 20], &[2.0, 4.0]).unwrap();
        for (a, b) in one.per_radius.iter().zip(&many.per_radius) {
            assert!(b.value <= a.value);
        }
    }

    #[test]
    fn growth_bound_on_binary_tree() {
        let (fam, g) = binary_tree(10, MeasureConvention::WeightedDegree);
        let d = MetricAssignment::build(&g, MetricRecipe::Natural).unwrap();
        let radii: Vec<f64> = (1..=10).map(f64::from).collect();
        let rec = verify_growth_bound(&g, &d, Some(&fam), 1.0 / 3.0, &radii, DEFAULT_GROWTH_SLACK)
            .unwrap();
        assert!(rec.passed && rec.is_applicable());
        assert_eq!(rec.context["dropped_radii"], serde_json::json!([10.0]));
        let trivial = verify_growth_bound(&g, &d, Some(&fam), 0.0, &radii, 0.0).unwrap();
        assert!(trivial.passed);
    }
}
