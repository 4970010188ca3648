//! Seeded verification suites. Each suite produces a list of certificate
//! records; the same name and seed always produce the same records.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificate::CertificateRecord;
use crate::curvature::{self, Orientation};
use crate::error::{Error, Result};
use crate::family::{GraphFamily, MeasureConvention, RandomMeasure, RandomSpec, SphereLaw};
use crate::graph::{VertexId, WeightedGraph};
use crate::growth::{self, DEFAULT_GROWTH_SLACK};
use crate::isoperimetry::{self, BallKind, DEFAULT_MAX_SIZE};
use crate::metric::{MetricAssignment, MetricRecipe};
use crate::potentials::{self, PotentialBoundary};
use crate::spectral::{self, verify};

pub const COAREA_TOLERANCE: f64 = 1e-9;
pub const CLAIM_COAREA: &str = "sum b d |df| = int |dOmega_t| dt";
pub const CLAIM_AREA: &str = "sum f m = int m(Omega_t) dt";
pub const CLAIM_BALL_RATIO: &str = "|dB_r|/m(B_r) <= 2^(-(r-1)/2)";
pub const CLAIM_BALL_LAMBDA0: &str = "lambda0(B_R) >= 3 - 2 sqrt(2), nonincreasing";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Cheeger,
    Strong,
    Coarea,
    Counterexample,
    Curvature,
    Potential,
    Upper,
    Growth,
    Essential,
}

impl SuiteName {
    pub const ALL: [SuiteName; 9] = [
        SuiteName::Cheeger,
        SuiteName::Strong,
        SuiteName::Coarea,
        SuiteName::Counterexample,
        SuiteName::Curvature,
        SuiteName::Potential,
        SuiteName::Upper,
        SuiteName::Growth,
        SuiteName::Essential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::Cheeger => "cheeger",
            SuiteName::Strong => "strong",
            SuiteName::Coarea => "coarea",
            SuiteName::Counterexample => "counterexample",
            SuiteName::Curvature => "curvature",
            SuiteName::Potential => "potential",
            SuiteName::Upper => "upper",
            SuiteName::Growth => "growth",
            SuiteName::Essential => "essential",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub seed: u64,
    pub records: Vec<CertificateRecord>,
}

impl SuiteReport {
    /// True when no applicable record failed.
    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CertificateRecord> {
        self.records.iter().filter(|r| r.is_failure())
    }

    pub fn applicable_count(&self) -> usize {
        self.records.iter().filter(|r| r.is_applicable()).count()
    }
}

pub fn run(suite: SuiteName, seed: u64) -> Result<SuiteReport> {
    let records = match suite {
        SuiteName::Cheeger => cheeger(seed)?,
        SuiteName::Strong => strong(seed)?,
        SuiteName::Coarea => coarea(seed)?,
        SuiteName::Counterexample => counterexample()?,
        SuiteName::Curvature => curvature()?,
        SuiteName::Potential => potential(seed)?,
        SuiteName::Upper => upper(seed)?,
        SuiteName::Growth => growth()?,
        SuiteName::Essential => essential()?,
    };
    Ok(SuiteReport {
        suite,
        seed,
        records,
    })
}

pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    SuiteName::ALL.iter().map(|&s| run(s, seed)).collect()
}

fn random_graph(
    rng: &mut ChaCha8Rng,
    max_vertices: usize,
    measure: RandomMeasure,
) -> WeightedGraph {
    let mut spec = RandomSpec::new(rng.gen_range(2..=max_vertices), rng.gen());
    spec.edge_probability = rng.gen_range(0.1..0.6);
    spec.measure = measure;
    GraphFamily::RandomWeighted(spec)
        .generate()
        .expect("suite specs are valid")
}

/// Nonempty proper subset of at most `max_len` vertices, sorted.
fn random_proper_subset(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> Vec<VertexId> {
    let len = rng.gen_range(1..=max_len.min(n - 1));
    let mut all: Vec<VertexId> = (0..n).collect();
    all.shuffle(rng);
    let mut set = all[..len].to_vec();
    set.sort_unstable();
    set
}

fn tagged(records: Vec<CertificateRecord>, case: usize) -> Vec<CertificateRecord> {
    records.into_iter().map(|r| r.with("case", case)).collect()
}

/// 200 random graphs with the canonical metric: `λ₀(U) ≥ α(U)²/2`.
fn cheeger(seed: u64) -> Result<Vec<CertificateRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for case in 0..200 {
        let g = random_graph(&mut rng, 14, RandomMeasure::Range(0.1, 3.0));
        let d = MetricAssignment::build(&g, MetricRecipe::Canonical)?;
        let u = random_proper_subset(&mut rng, g.vertex_count(), 13);
        let mut pair = verify::verify_cheeger(&g, &d, &u, DEFAULT_MAX_SIZE)?;
        pair.truncate(1);
        records.extend(tagged(pair, case));
    }
    Ok(records)
}

/// 100 random graphs with `m = n` and the natural metric, plus the path
/// on three vertices where the strong bound is attained.
fn strong(seed: u64) -> Result<Vec<CertificateRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for case in 0..100 {
        let g = random_graph(&mut rng, 14, RandomMeasure::WeightedDegree);
        let d = MetricAssignment::build(&g, MetricRecipe::Natural)?;
        let u = random_proper_subset(&mut rng, g.vertex_count(), 13);
        let pair = verify::verify_cheeger(&g, &d, &u, DEFAULT_MAX_SIZE)?;
        records.extend(tagged(pair, case));
    }
    let path = GraphFamily::Path {
        radius: 2,
        measure: MeasureConvention::WeightedDegree,
    }
    .generate()?;
    let d = MetricAssignment::build(&path, MetricRecipe::Natural)?;
    let mut pair = verify::verify_cheeger(&path, &d, &[1], DEFAULT_MAX_SIZE)?;
    records.push(pair.remove(1).with("case", "path middle vertex"));
    Ok(records)
}

/// 500 random `(graph, metric, f ≥ 0)` triples, both integral identities.
fn coarea(seed: u64) -> Result<Vec<CertificateRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let recipes = [
        MetricRecipe::Natural,
        MetricRecipe::Canonical,
        MetricRecipe::InverseDegree,
    ];
    let mut records = Vec::new();
    for case in 0..500 {
        let g = random_graph(&mut rng, 16, RandomMeasure::Range(0.1, 3.0));
        let recipe = recipes[rng.gen_range(0..recipes.len())];
        let d = MetricAssignment::build(&g, recipe)?;
        // Small integer levels half of the time so that ties occur.
        let ties = rng.gen_bool(0.5);
        let f: Vec<f64> = g
            .vertices()
            .map(|_| {
                if ties {
                    f64::from(rng.gen_range(0u8..4))
                } else {
                    rng.gen_range(0.0..5.0)
                }
            })
            .collect();
        let check = isoperimetry::coarea_check(&g, &d, &f)?;
        records.push(
            CertificateRecord::inequality(CLAIM_COAREA, COAREA_TOLERANCE, check.coarea_gap(), 0.0)
                .with("case", case)
                .with("recipe", recipe)
                .with("check", check),
        );
        records.push(
            CertificateRecord::inequality(CLAIM_AREA, COAREA_TOLERANCE, check.area_gap(), 0.0)
                .with("case", case)
                .with("check", check),
        );
    }
    Ok(records)
}

/// Binary tree with complete spheres, unit measure, inverse-degree metric.
fn counterexample() -> Result<Vec<CertificateRecord>> {
    let fam = GraphFamily::TreeWithSphereEdges {
        k: 2,
        radius: 8,
        measure: MeasureConvention::Unit,
    };
    let g = fam.generate()?;
    let d = MetricAssignment::build(&g, MetricRecipe::InverseDegree)?;
    let radii: Vec<f64> = (2..=6).map(f64::from).collect();
    let balls = isoperimetry::cheeger_balls(&g, &d, 0, &radii, BallKind::Combinatorial)?;
    let mut records = Vec::new();
    for (r, ball) in radii.iter().zip(&balls) {
        let bound = 2f64.powf(-(r - 1.0) / 2.0);
        records.push(
            CertificateRecord::inequality(CLAIM_BALL_RATIO, bound, ball.ratio, 0.0)
                .with("r", r)
                .with("ball_size", ball.set.len()),
        );
    }
    let floor = 3.0 - 2.0 * 2f64.sqrt();
    let mut previous = f64::INFINITY;
    for (r, ball) in (2..=6).zip(&balls) {
        let lambda = spectral::dirichlet_lambda0(&g, &ball.set)?.lambda0;
        let mut record = CertificateRecord::inequality(CLAIM_BALL_LAMBDA0, lambda, floor, 1e-8)
            .with("R", r)
            .with("previous", previous);
        if lambda > previous + verify::BOUND_TOLERANCE {
            record = record.fail("lambda0 increased with R");
        }
        previous = lambda;
        records.push(record);
    }
    Ok(records)
}

/// Sphere-oriented curvature on regular trees and on the square antitree.
fn curvature() -> Result<Vec<CertificateRecord>> {
    let mut records = Vec::new();
    for (k, radius) in [(2, 4), (3, 3), (4, 3)] {
        let fam = GraphFamily::KRegularTree {
            k,
            radius,
            measure: MeasureConvention::WeightedDegree,
        };
        let g = fam.generate()?;
        let d = MetricAssignment::build(&g, MetricRecipe::Natural)?;
        let o = Orientation::spheres(&g, 0)?;
        let interior = fam.interior(&g)?;
        let expected = (k as f64 - 1.0) / (k as f64 + 1.0);
        let field = curvature::curvature(&g, &d, &o, &interior);
        let mut record = curvature::verify_curvature_bound(&g, &d, &o, &interior, interior.len())?
            .with("k", k)
            .with("expected_k_lower", expected);
        if field.k_lower != expected {
            record = record.fail("interior k_lower differs from (k-1)/(k+1)");
        }
        records.push(record);
    }

    let fam = GraphFamily::Antitree {
        spheres: SphereLaw::Square,
        radius: 7,
        measure: MeasureConvention::Unit,
    };
    let g = fam.generate()?;
    let d = MetricAssignment::build(&g, MetricRecipe::InverseDegree)?;
    let o = Orientation::spheres(&g, 0)?;
    let hops = g.hop_distances(0);
    let within = |r: usize| -> Vec<VertexId> {
        g.vertices()
            .filter(|&x| hops[x].is_some_and(|h| h <= r))
            .collect()
    };
    let field = curvature::curvature(&g, &d, &o, &within(5));
    let u = within(2);
    let mut record = curvature::verify_curvature_bound(&g, &d, &o, &u, u.len())?
        .with("family", "antitree")
        .with("k_lower_spheres_0_to_5", field.k_lower);
    if !(field.k_lower > 0.0) {
        record = record.fail("k_lower is not positive on spheres 0..5");
    }
    records.push(record);
    Ok(records)
}

/// 50 random graphs with potential: form identity and the Cheeger bound.
fn potential(seed: u64) -> Result<Vec<CertificateRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for case in 0..50 {
        let mut spec = RandomSpec::new(rng.gen_range(2..=12), rng.gen());
        spec.edge_probability = rng.gen_range(0.1..0.6);
        spec.potential_range = Some((0.05, 3.0));
        spec.potential_density = rng.gen_range(0.3..1.0);
        let g = GraphFamily::RandomWeighted(spec).generate()?;
        let d = MetricAssignment::build(&g, MetricRecipe::PotentialAdapted)?;
        let delta = potentials::adapt_delta(&g, &d)?;
        let doubled = potentials::double(&g, &d, &delta)?;
        records.push(
            potentials::verify_potential_form_identity(&doubled, 100, rng.gen()).with("case", case),
        );
        // A potential makes the whole vertex set a valid Dirichlet domain too.
        let len = rng.gen_range(1..=g.vertex_count());
        let mut all: Vec<VertexId> = g.vertices().collect();
        all.shuffle(&mut rng);
        let mut u = all[..len].to_vec();
        u.sort_unstable();
        records.push(
            potentials::verify_potential_cheeger(
                &doubled,
                &u,
                DEFAULT_MAX_SIZE,
                PotentialBoundary::PerVertex,
            )?
            .with("case", case),
        );
    }
    Ok(records)
}

/// 100 random graphs with unit edge lengths and a random `W` each.
fn upper(seed: u64) -> Result<Vec<CertificateRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for case in 0..100 {
        let g = random_graph(&mut rng, 14, RandomMeasure::Range(0.1, 3.0));
        let d = MetricAssignment::build(&g, MetricRecipe::Natural)?;
        let w = random_proper_subset(&mut rng, g.vertex_count(), g.vertex_count());
        records.extend(tagged(verify::verify_upper_bound(&g, &d, 1.0, &[w])?, case));
    }
    Ok(records)
}

/// Regular trees of depth 10: `2·k_lower ≤ μ̂ + slack`.
fn growth() -> Result<Vec<CertificateRecord>> {
    let mut records = Vec::new();
    for k in 2..=4 {
        let fam = GraphFamily::KRegularTree {
            k,
            radius: 10,
            measure: MeasureConvention::WeightedDegree,
        };
        let g = fam.generate()?;
        let d = MetricAssignment::build(&g, MetricRecipe::Natural)?;
        let o = Orientation::spheres(&g, 0)?;
        let interior = fam.interior(&g)?;
        let k_lower = curvature::curvature(&g, &d, &o, &interior).k_lower;
        let radii: Vec<f64> = (1..=10).map(f64::from).collect();
        records.push(
            growth::verify_growth_bound(&g, &d, Some(&fam), k_lower, &radii, DEFAULT_GROWTH_SLACK)?
                .with("k", k),
        );
    }
    Ok(records)
}

/// Truncation surrogates for the essential-spectrum bound on regular trees.
fn essential() -> Result<Vec<CertificateRecord>> {
    let mut records = Vec::new();
    for (k, radius) in [(2, 7), (3, 5)] {
        let fam = GraphFamily::KRegularTree {
            k,
            radius,
            measure: MeasureConvention::WeightedDegree,
        };
        let g = fam.generate()?;
        let d = MetricAssignment::build(&g, MetricRecipe::Natural)?;
        let set = verify::verify_essential(&g, &d, &fam, &[1, 2, 3], DEFAULT_MAX_SIZE)?;
        records.extend(set.into_iter().map(|r| r.with("k", k)));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in SuiteName::ALL {
            assert_eq!(s.name().parse::<SuiteName>().unwrap(), s);
        }
        assert!("nope".parse::<SuiteName>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        for s in [SuiteName::Counterexample, SuiteName::Essential] {
            let report = run(s, 0).unwrap();
            assert!(
                report.passed(),
                "{s}: {:?}",
                report.failures().collect::<Vec<_>>()
            );
        }
    }
}
