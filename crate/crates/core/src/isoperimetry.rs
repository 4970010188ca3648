//! Boundary measures, Cheeger constants and the co-area identities.
//!
//! For a vertex set `W` the boundary `∂W` is the set of ordered pairs
//! `(x, y)` with `x ∈ W`, `y ∉ W`, `b(x, y) > 0`, and
//! `|∂W| = Σ_{(x,y) ∈ ∂W} b(x, y) d(x, y)` with `d` the path-closed edge
//! distance. The Cheeger constant of `U` is the minimum of `|∂W| / m(W)` over
//! nonempty `W ⊆ U`.
//!
//! Exact mode enumerates every nonempty subset (disconnected ones included)
//! in Gray-code order, updating boundary and volume incrementally. Heuristic
//! modes (`balls`, `sweep`) only ever return ratios of concrete sets, so they
//! are upper bounds for the exact value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::GraphFamily;
use crate::graph::{VertexId, WeightedGraph};
use crate::metric::MetricAssignment;
use crate::spectral::{self, FormMatrix};

pub const DEFAULT_MAX_SIZE: usize = 20;

/// Largest subset size any enumeration accepts, whatever `max_size` says.
const HARD_ENUMERATION_LIMIT: usize = 40;

/// Relative tolerance under which two ratios count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutReport {
    #[serde(rename = "W")]
    pub set: Vec<VertexId>,
    pub boundary_measure: f64,
    pub volume: f64,
    pub ratio: f64,
    /// Potential contribution included in `boundary_measure`, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential_term: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheegerMode {
    Exact,
    Balls,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheegerResult {
    pub alpha: f64,
    #[serde(rename = "optimal_W")]
    pub optimal_set: Vec<VertexId>,
    pub mode: CheegerMode,
    pub enumeration_count: u64,
}

/// How balls around a center are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallKind {
    /// `{y : d(center, y) ≤ r}` in the metric.
    Metric,
    /// `{y : hops(center, y) ≤ r}` in the natural graph distance.
    Combinatorial,
}

/// Per-arc and per-vertex costs of a cut. The plain boundary measure uses
/// `arc = b·d` and no vertex term; potentials add to either.
#[derive(Debug, Clone)]
pub(crate) struct CutCosts {
    pub arc: Vec<f64>,
    pub vertex: Vec<f64>,
}

impl CutCosts {
    pub fn new(graph: &WeightedGraph, metric: &MetricAssignment) -> Self {
        let arc = (0..graph.arc_count())
            .map(|s| graph.arc_weight(s) * metric.edge_dist(s))
            .collect();
        Self {
            arc,
            vertex: vec![0.0; graph.vertex_count()],
        }
    }

    fn arc_cost(&self, graph: &WeightedGraph, x: VertexId, y: VertexId) -> f64 {
        graph.arc_slot(x, y).map_or(0.0, |s| self.arc[s])
    }

    /// Cut value of a set given by a membership mask; the empty set is allowed.
    pub fn cut_value(&self, graph: &WeightedGraph, member: &[bool]) -> (f64, f64) {
        let mut boundary = 0.0;
        let mut vertex_term = 0.0;
        for x in graph.vertices().filter(|&x| member[x]) {
            vertex_term += self.vertex[x];
            for slot in graph.arc_range(x) {
                if !member[graph.arc_target(slot)] {
                    boundary += self.arc[slot];
                }
            }
        }
        (boundary + vertex_term, vertex_term)
    }

    pub fn report(&self, graph: &WeightedGraph, set: &[VertexId]) -> Result<CutReport> {
        let set = normalize_set(graph, set)?;
        if set.is_empty() {
            return Err(Error::Argument("W must be nonempty".into()));
        }
        let mut member = vec![false; graph.vertex_count()];
        for &x in &set {
            member[x] = true;
        }
        let (boundary_measure, vertex_term) = self.cut_value(graph, &member);
        let volume = graph.volume(&set);
        let has_vertex_costs = self.vertex.iter().any(|&v| v != 0.0);
        Ok(CutReport {
            ratio: boundary_measure / volume,
            set,
            boundary_measure,
            volume,
            potential_term: has_vertex_costs.then_some(vertex_term),
        })
    }

    /// Exact minimum of `cut / m(W)` over nonempty `W ⊆ subset`.
    pub fn minimize(
        &self,
        graph: &WeightedGraph,
        subset: &[VertexId],
        max_size: usize,
    ) -> Result<CheegerResult> {
        let subset = normalize_set(graph, subset)?;
        if subset.is_empty() {
            return Err(Error::Argument("U must be nonempty".into()));
        }
        let k = subset.len();
        if k > max_size.min(HARD_ENUMERATION_LIMIT) {
            return Err(Error::Capacity {
                size: k,
                max_size: max_size.min(HARD_ENUMERATION_LIMIT),
            });
        }
        let table = LocalTable::new(self, graph, &subset);
        let prefix_bits = k.min(6);
        let low_bits = k - prefix_bits;
        let blocks: Vec<Option<(f64, u64)>> = (0..1u64 << prefix_bits)
            .into_par_iter()
            .map(|prefix| table.scan_block(prefix << low_bits, low_bits))
            .collect();
        let mut best: Option<(f64, u64)> = None;
        for candidate in blocks.into_iter().flatten() {
            best = Some(match best {
                None => candidate,
                Some(current) => better(current, candidate),
            });
        }
        let (_, mask) = best.expect("at least one nonempty subset");
        let optimal_set: Vec<VertexId> = (0..k)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| subset[i])
            .collect();
        let exact = self.report(graph, &optimal_set)?;
        Ok(CheegerResult {
            alpha: exact.ratio,
            optimal_set,
            mode: CheegerMode::Exact,
            enumeration_count: (1u64 << k) - 1,
        })
    }

    /// Calls `visit(mask, cut, volume)` for every nonempty `W ⊆ subset`, with
    /// bit `i` of `mask` standing for the `i`-th smallest vertex of `subset`.
    /// Returns the sorted subset.
    pub fn for_each_subset(
        &self,
        graph: &WeightedGraph,
        subset: &[VertexId],
        max_size: usize,
        mut visit: impl FnMut(u64, f64, f64),
    ) -> Result<Vec<VertexId>> {
        let subset = normalize_set(graph, subset)?;
        let limit = max_size.min(HARD_ENUMERATION_LIMIT);
        if subset.len() > limit {
            return Err(Error::Capacity {
                size: subset.len(),
                max_size: limit,
            });
        }
        LocalTable::new(self, graph, &subset).walk(0, subset.len(), |mask, cut, volume| {
            if mask != 0 {
                visit(mask, cut, volume);
            }
        });
        Ok(subset)
    }

    /// Best superlevel set of `score` (ties grouped) among vertices of `subset`.
    pub fn sweep(
        &self,
        graph: &WeightedGraph,
        subset: &[VertexId],
        score: &[f64],
    ) -> Result<CutReport> {
        let subset = normalize_set(graph, subset)?;
        if subset.is_empty() {
            return Err(Error::Argument("U must be nonempty".into()));
        }
        let mut order: Vec<usize> = (0..subset.len()).collect();
        order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
        let mut member = vec![false; graph.vertex_count()];
        let mut cut = 0.0;
        let mut volume = 0.0;
        let mut best: Option<(f64, usize)> = None;
        for (pos, &i) in order.iter().enumerate() {
            let x = subset[i];
            cut += self.vertex[x];
            for slot in graph.arc_range(x) {
                let y = graph.arc_target(slot);
                if y == x {
                    continue;
                }
                if member[y] {
                    cut -= self.arc_cost(graph, y, x);
                } else {
                    cut += self.arc[slot];
                }
            }
            member[x] = true;
            volume += graph.m(x);
            let group_ends = order
                .get(pos + 1)
                .is_none_or(|&next| score[next] != score[i]);
            if group_ends {
                let ratio = cut / volume;
                if best.is_none_or(|(r, _)| ratio < r) {
                    best = Some((ratio, pos + 1));
                }
            }
        }
        let (_, len) = best.unwrap();
        let set: Vec<VertexId> = order[..len].iter().map(|&i| subset[i]).collect();
        self.report(graph, &set)
    }
}

/// Prefers the smaller ratio; near-ties go to the lexicographically smaller set.
fn better(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    let tol = TIE_TOLERANCE * a.0.abs().max(b.0.abs()).max(1.0);
    if b.0 < a.0 - tol {
        b
    } else if a.0 < b.0 - tol {
        a
    } else if lex_less(b.1, a.1) {
        b
    } else {
        a
    }
}

/// Lexicographic order of the sorted index lists encoded by two masks.
fn lex_less(mut a: u64, mut b: u64) -> bool {
    while a != 0 && b != 0 {
        let (la, lb) = (a.trailing_zeros(), b.trailing_zeros());
        if la != lb {
            return la < lb;
        }
        a &= a - 1;
        b &= b - 1;
    }
    a == 0 && b != 0
}

/// Costs restricted to the enumerated subset, in local indices.
struct LocalTable {
    /// Cut change from adding local vertex `i` to the empty set.
    base: Vec<f64>,
    /// `arc(i, j) + arc(j, i)` for local neighbors.
    pair: Vec<Vec<f64>>,
    adjacency: Vec<u64>,
    measure: Vec<f64>,
}

impl LocalTable {
    fn new(costs: &CutCosts, graph: &WeightedGraph, subset: &[VertexId]) -> Self {
        let k = subset.len();
        let mut local = vec![usize::MAX; graph.vertex_count()];
        for (i, &x) in subset.iter().enumerate() {
            local[x] = i;
        }
        let mut base = vec![0.0; k];
        let mut pair = vec![vec![0.0; k]; k];
        let mut adjacency = vec![0u64; k];
        for (i, &x) in subset.iter().enumerate() {
            base[i] = costs.vertex[x];
            for slot in graph.arc_range(x) {
                let y = graph.arc_target(slot);
                if y == x {
                    continue;
                }
                base[i] += costs.arc[slot];
                let j = local[y];
                if j != usize::MAX {
                    pair[i][j] = costs.arc[slot] + costs.arc_cost(graph, y, x);
                    adjacency[i] |= 1 << j;
                }
            }
        }
        let measure = subset.iter().map(|&x| graph.m(x)).collect();
        Self {
            base,
            pair,
            adjacency,
            measure,
        }
    }

    fn direct(&self, mask: u64) -> (f64, f64) {
        let mut cut = 0.0;
        let mut volume = 0.0;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            cut += self.base[i];
            volume += self.measure[i];
            let mut inner = self.adjacency[i] & mask;
            while inner != 0 {
                let j = inner.trailing_zeros() as usize;
                inner &= inner - 1;
                // arc(i, j) is internal and arc(j, i) is not leaving W;
                // halve since the pair is visited from both ends.
                cut -= 0.5 * self.pair[i][j];
            }
        }
        (cut, volume)
    }

    /// Best ratio over the block whose high bits are fixed to `start`.
    fn scan_block(&self, start: u64, low_bits: usize) -> Option<(f64, u64)> {
        let mut best = None;
        self.walk(start, low_bits, |mask, cut, volume| {
            if mask != 0 {
                let candidate = (cut / volume, mask);
                best = Some(match best {
                    None => candidate,
                    Some(current) => better(current, candidate),
                });
            }
        });
        best
    }

    /// Gray-code walk of the `low_bits` lowest bits with higher bits fixed to
    /// `start`, reporting `(mask, cut, volume)` for every visited mask.
    fn walk(&self, start: u64, low_bits: usize, mut visit: impl FnMut(u64, f64, f64)) {
        let mut mask = start;
        let (mut cut, mut volume) = self.direct(mask);
        visit(mask, cut, volume);
        for t in 1..(1u64 << low_bits) {
            let i = t.trailing_zeros() as usize;
            let bit = 1u64 << i;
            let mut shared = 0.0;
            let mut inner = self.adjacency[i] & mask & !bit;
            while inner != 0 {
                let j = inner.trailing_zeros() as usize;
                inner &= inner - 1;
                shared += self.pair[i][j];
            }
            let delta = self.base[i] - shared;
            if mask & bit == 0 {
                cut += delta;
                volume += self.measure[i];
            } else {
                cut -= delta;
                volume -= self.measure[i];
            }
            mask ^= bit;
            visit(mask, cut, volume);
        }
    }
}

pub(crate) fn normalize_set(graph: &WeightedGraph, set: &[VertexId]) -> Result<Vec<VertexId>> {
    let mut set = set.to_vec();
    set.sort_unstable();
    set.dedup();
    if let Some(&x) = set.iter().find(|&&x| x >= graph.vertex_count()) {
        return Err(Error::Argument(format!("vertex {x} out of range")));
    }
    Ok(set)
}

pub fn boundary(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    set: &[VertexId],
) -> Result<CutReport> {
    CutCosts::new(graph, metric).report(graph, set)
}

/// `α(U)` by exhaustive enumeration. Ties go to the lexicographically
/// smallest subset in vertex order.
pub fn cheeger_exact(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    subset: &[VertexId],
    max_size: usize,
) -> Result<CheegerResult> {
    CutCosts::new(graph, metric).minimize(graph, subset, max_size)
}

/// Cut reports of balls around `center`. Every ratio bounds `α` from above.
pub fn cheeger_balls(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    center: VertexId,
    radii: &[f64],
    kind: BallKind,
) -> Result<Vec<CutReport>> {
    if center >= graph.vertex_count() {
        return Err(Error::Argument(format!("center {center} out of range")));
    }
    if let Some(r) = radii.iter().find(|&&r| !(r > 0.0)) {
        return Err(Error::Argument(format!("radii must be positive, got {r}")));
    }
    let dist = ball_distances(graph, metric, center, kind);
    let costs = CutCosts::new(graph, metric);
    radii
        .iter()
        .map(|&r| costs.report(graph, &ball(&dist, r)))
        .collect()
}

pub(crate) fn ball_distances(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    center: VertexId,
    kind: BallKind,
) -> Vec<f64> {
    match kind {
        BallKind::Metric => metric.distances_from(graph, center),
        BallKind::Combinatorial => graph
            .hop_distances(center)
            .into_iter()
            .map(|h| h.map_or(f64::INFINITY, |h| h as f64))
            .collect(),
    }
}

/// `{y : dist[y] ≤ r}`, with a relative slack of a few ulps so that sums of
/// equal edge lengths land inside the ball they should.
pub(crate) fn ball(dist: &[f64], r: f64) -> Vec<VertexId> {
    let limit = r * (1.0 + 1e-12);
    dist.iter()
        .enumerate()
        .filter(|(_, &d)| d <= limit)
        .map(|(y, _)| y)
        .collect()
}

/// Sweep over superlevel sets of `u²`, where `u` is the Dirichlet ground state
/// on `subset`.
pub fn cheeger_sweep(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    subset: &[VertexId],
) -> Result<CheegerResult> {
    let form = FormMatrix::assemble(graph, subset)?;
    let ground = spectral::lambda0(&form)?;
    let score: Vec<f64> = ground.eigenvector.iter().map(|u| u * u).collect();
    let best = CutCosts::new(graph, metric).sweep(graph, form.subset(), &score)?;
    Ok(CheegerResult {
        alpha: best.ratio,
        optimal_set: best.set,
        mode: CheegerMode::Sweep,
        enumeration_count: form.subset().len() as u64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfinityEstimate {
    pub radius: usize,
    pub alpha: f64,
    pub mode: CheegerMode,
    pub set_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtInfinity {
    pub estimates: Vec<InfinityEstimate>,
    /// Radii whose exhausted set was empty.
    pub skipped: Vec<usize>,
}

/// Vertices of the truncation interior with hop distance `> radius` from the root.
pub fn exhausted_interior(
    graph: &WeightedGraph,
    family: &GraphFamily,
    radius: usize,
) -> Result<Vec<VertexId>> {
    let interior = family.interior(graph)?;
    let hops = graph.hop_distances(0);
    Ok(interior
        .into_iter()
        .filter(|&x| hops[x].is_some_and(|h| h > radius))
        .collect())
}

/// Estimates of `α(interior \ B_k(root))` for each exhaustion radius `k`.
///
/// Exact when the set is small enough, otherwise a sweep upper bound. Since
/// the exact values are nondecreasing in `k`, each heuristic value is replaced
/// by the minimum over itself and all later estimates, which is still an upper
/// bound and makes the sequence nondecreasing.
pub fn cheeger_at_infinity(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    family: &GraphFamily,
    exhaustion_radii: &[usize],
    max_size: usize,
) -> Result<AtInfinity> {
    let mut radii = exhaustion_radii.to_vec();
    radii.sort_unstable();
    radii.dedup();
    let mut estimates = Vec::new();
    let mut skipped = Vec::new();
    for &k in &radii {
        let set = exhausted_interior(graph, family, k)?;
        if set.is_empty() {
            skipped.push(k);
            continue;
        }
        let result = if set.len() <= max_size {
            cheeger_exact(graph, metric, &set, max_size)?
        } else {
            cheeger_sweep(graph, metric, &set)?
        };
        estimates.push(InfinityEstimate {
            radius: k,
            alpha: result.alpha,
            mode: result.mode,
            set_size: set.len(),
        });
    }
    for i in (0..estimates.len().saturating_sub(1)).rev() {
        let later = estimates[i + 1].alpha;
        if estimates[i].alpha > later {
            estimates[i].alpha = later;
        }
    }
    Ok(AtInfinity { estimates, skipped })
}

/// `Ω_t = {x : f(x) > t}` is constant for `t ∈ [lower, upper)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperlevelSet {
    pub lower: f64,
    pub upper: f64,
    pub set: Vec<VertexId>,
}

/// Piecewise-constant representation of `t ↦ Ω_t` on `t ≥ 0`. Sets are
/// nested and listed from the largest down; `t` beyond `max f` gives the
/// empty set and is omitted.
pub fn superlevel_sets(graph: &WeightedGraph, f: &[f64]) -> Result<Vec<SuperlevelSet>> {
    check_function(graph, f)?;
    let mut levels: Vec<f64> = f.iter().copied().filter(|&v| v > 0.0).collect();
    levels.push(0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    Ok(levels
        .windows(2)
        .map(|w| SuperlevelSet {
            lower: w[0],
            upper: w[1],
            set: graph.vertices().filter(|&x| f[x] > w[0]).collect(),
        })
        .collect())
}

fn check_function(graph: &WeightedGraph, f: &[f64]) -> Result<()> {
    if f.len() != graph.vertex_count() {
        return Err(Error::Argument(format!(
            "function has {} values for {} vertices",
            f.len(),
            graph.vertex_count()
        )));
    }
    if let Some((x, v)) = f
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v >= 0.0 && v.is_finite()))
    {
        return Err(Error::Argument(format!(
            "function must be finite and nonnegative, f({x}) = {v}"
        )));
    }
    Ok(())
}

/// Both sides of the co-area formula and of the area formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoareaCheck {
    /// `½ Σ_{x,y} b(x,y) d(x,y) |f(x) − f(y)|`.
    pub edge_sum: f64,
    /// `∫_0^∞ |∂Ω_t| dt`.
    pub boundary_integral: f64,
    /// `Σ_x f(x) m(x)`.
    pub weighted_sum: f64,
    /// `∫_0^∞ m(Ω_t) dt`.
    pub volume_integral: f64,
}

impl CoareaCheck {
    pub fn coarea_gap(&self) -> f64 {
        (self.edge_sum - self.boundary_integral).abs() / (1.0 + self.edge_sum.abs())
    }

    pub fn area_gap(&self) -> f64 {
        (self.weighted_sum - self.volume_integral).abs() / (1.0 + self.weighted_sum.abs())
    }
}

pub fn coarea_check(
    graph: &WeightedGraph,
    metric: &MetricAssignment,
    f: &[f64],
) -> Result<CoareaCheck> {
    let levels = superlevel_sets(graph, f)?;
    let mut edge_sum = 0.0;
    for x in graph.vertices() {
        for slot in graph.arc_range(x) {
            let y = graph.arc_target(slot);
            edge_sum += graph.arc_weight(slot) * metric.edge_dist(slot) * (f[x] - f[y]).abs();
        }
    }
    edge_sum *= 0.5;
    let weighted_sum = graph.vertices().map(|x| f[x] * graph.m(x)).sum();

    let costs = CutCosts::new(graph, metric);
    let mut member = vec![false; graph.vertex_count()];
    let mut boundary_integral = 0.0;
    let mut volume_integral = 0.0;
    for level in &levels {
        member.iter_mut().for_each(|m| *m = false);
        for &x in &level.set {
            member[x] = true;
        }
        let width = level.upper - level.lower;
        boundary_integral += width * costs.cut_value(graph, &member).0;
        volume_integral += width * graph.volume(&level.set);
    }
    Ok(CoareaCheck {
        edge_sum,
        boundary_integral,
        weighted_sum,
        volume_integral,
    })
}
