//! Certificates pairing Dirichlet ground states with isoperimetric constants.

use crate::certificate::CertificateRecord;
use crate::error::{Error, Result};
use crate::family::GraphFamily;
use crate::graph::{VertexId, WeightedGraph};
use crate::isoperimetry::{self, CheegerMode};
use crate::metric::MetricAssignment;

use super::dirichlet_lambda0;

/// Slack allowed on every asserted spectral inequality.
pub const BOUND_TOLERANCE: f64 = 1e-9;

pub const CLAIM_CHEEGER: &str = "lambda0 >= alpha^2/2";
pub const CLAIM_CHEEGER_STRONG: &str = "lambda0 >= 1 - sqrt(1 - alpha^2)";
pub const CLAIM_ESSENTIAL: &str = "lambda0(X\\K) >= alpha(X\\K)^2/2";
pub const CLAIM_UPPER_CHAIN: &str = "|dW| >= delta*Q(1_W)";

fn require_intrinsic(graph: &WeightedGraph, metric: &MetricAssignment) -> Result<()> {
    let cert = metric.certify_intrinsic(graph);
    if cert.is_intrinsic {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "metric is not intrinsic (slack {:.3e} at vertex {})",
            cert.slack[cert.worst_vertex], cert.worst_vertex
        )))
    }
}

/// `1 − √(1 − α²)`, with `α ≤ 1` clamped so rounding cannot produce a NaN.
pub fn strong_cheeger_bound(alpha: f64) -> f64 {
    1.0 - (1.0 - (alpha * alpha).min(1.0)).sqrt()
}

/// Dirichlet `λ₀` on `U` against the exact `α(U)`.
///
/// The first record is always `λ₀ ≥ α²/2`. The second is the stronger
/// `λ₀ ≥ 1 − √(1 − α²)`, asserted only when `m ≥ n` everywhere and every edge
/// distance is `≥ 1` or every one is `≤ 1`; otherwise it is not applicable.
pub fn verify_cheeger(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    subset: &[VertexId],
    max_size: usize,
) -> Result<Vec<CertificateRecord>> {
    require_intrinsic(graph, metric)?;
    let cheeger = isoperimetry::cheeger_exact(graph, metric, subset, max_size)?;
    let ground = dirichlet_lambda0(graph, subset)?;
    let alpha = cheeger.alpha;
    let lambda = ground.lambda0;

    let weak =
        CertificateRecord::inequality(CLAIM_CHEEGER, lambda, alpha * alpha / 2.0, BOUND_TOLERANCE)
            .with("alpha", alpha)
            .with("optimal_W", &cheeger.optimal_set)
            .with("U", &ground.subset)
            .with("residual", ground.residual);

    let comparison = metric.unit_comparison();
    let strong = if !graph.measure_dominates_degree() {
        CertificateRecord::not_applicable(CLAIM_CHEEGER_STRONG, "m >= n fails")
    } else if !comparison.is_comparable() {
        CertificateRecord::not_applicable(
            CLAIM_CHEEGER_STRONG,
            "edge distances are neither all >= 1 nor all <= 1",
        )
    } else {
        CertificateRecord::inequality(
            CLAIM_CHEEGER_STRONG,
            lambda,
            strong_cheeger_bound(alpha),
            BOUND_TOLERANCE,
        )
        .with("alpha", alpha)
        .with("unit_comparison", comparison)
    };
    Ok(vec![weak, strong])
}

/// For each exhaustion radius `k`, the Dirichlet `λ₀` on `interior \ B_k`
/// against `α(interior \ B_k)`. Both are finite-truncation stand-ins for the
/// bottom of the essential spectrum and the constant at infinity; only the
/// per-truncation inequality is certified.
pub fn verify_essential(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    family: &GraphFamily,
    exhaustion_radii: &[usize],
    max_size: usize,
) -> Result<Vec<CertificateRecord>> {
    require_intrinsic(graph, metric)?;
    let estimates =
        isoperimetry::cheeger_at_infinity(graph, metric, family, exhaustion_radii, max_size)?;
    let mut records = Vec::new();
    for est in &estimates.estimates {
        let set = isoperimetry::exhausted_interior(graph, family, est.radius)?;
        let ground = dirichlet_lambda0(graph, &set)?;
        let rhs = est.alpha * est.alpha / 2.0;
        let record =
            CertificateRecord::inequality(CLAIM_ESSENTIAL, ground.lambda0, rhs, BOUND_TOLERANCE)
                .with("exhaustion_radius", est.radius)
                .with("set_size", est.set_size)
                .with("alpha", est.alpha)
                .with("alpha_mode", est.mode)
                .with(
                    "scope",
                    "finite truncation surrogate for the essential spectrum",
                );
        // A heuristic alpha is an upper bound, so only a pass is conclusive.
        let record = if est.mode != CheegerMode::Exact && !record.passed {
            CertificateRecord::not_applicable(
                CLAIM_ESSENTIAL,
                "heuristic alpha exceeds the bound; inconclusive",
            )
            .with("exhaustion_radius", est.radius)
        } else {
            record
        };
        records.push(record);
    }
    Ok(records)
}

/// For uniformly discrete metrics (`d ≥ δ` on edges) checks
/// `|∂W| ≥ δ Q(1_W)` for every given `W` and compares the implied bound
/// `|∂W| / (δ m(W))` against `λ₀` of the whole graph.
pub fn verify_upper_bound(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    delta: f64,
    subsets: &[Vec<VertexId>],
) -> Result<Vec<CertificateRecord>> {
    if !(delta > 0.0) {
        return Err(Error::Argument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    for x in graph.vertices() {
        for slot in graph.arc_range(x) {
            let d = metric.edge_dist(slot);
            if d < delta {
                return Err(Error::Precondition(format!(
                    "edge ({x}, {}) has distance {d} < delta = {delta}",
                    graph.arc_target(slot)
                )));
            }
        }
    }
    let all: Vec<VertexId> = graph.vertices().collect();
    let full = dirichlet_lambda0(graph, &all)?;
    let mut records = Vec::with_capacity(subsets.len());
    for set in subsets {
        let cut = isoperimetry::boundary(graph, metric, set)?;
        // Q(1_W) is the plain b-weight of the boundary pairs.
        let mut member = vec![false; graph.vertex_count()];
        set.iter().for_each(|&x| member[x] = true);
        let form_value: f64 = cut
            .set
            .iter()
            .flat_map(|&x| graph.neighbors(x))
            .filter(|&(y, _)| !member[y])
            .map(|(_, b)| b)
            .sum();
        let implied = cut.boundary_measure / (delta * cut.volume);
        let record = CertificateRecord::inequality(
            CLAIM_UPPER_CHAIN,
            cut.boundary_measure,
            delta * form_value,
            BOUND_TOLERANCE,
        )
        .with("delta", delta)
        .with("W", &cut.set)
        .with("implied_lambda0_upper_bound", implied)
        .with("lambda0_full", full.lambda0);
        let record = if implied < full.lambda0 - BOUND_TOLERANCE {
            record.fail("implied upper bound below full-graph lambda0")
        } else {
            record
        };
        records.push(record);
    }
    Ok(records)
}
