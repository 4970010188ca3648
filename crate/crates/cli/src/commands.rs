use cheeger_core::curvature::{self, Orientation};
use cheeger_core::growth;
use cheeger_core::isoperimetry::{self, BallKind, CutReport};
use cheeger_core::potentials::{self, PotentialBoundary};
use cheeger_core::spectral::{self, verify, FormMatrix, SolverMethod};
use cheeger_core::suite::{self, SuiteName, SuiteReport};
use cheeger_core::{
    CertificateRecord, GraphDocument, GraphFamily, MeasureConvention, RandomMeasure, RandomSpec,
    SphereLaw,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::io::{self, Envelope, Failure};
use crate::{
    BoundaryArg, CheegerArgs, CheegerModeArg, CurvatureArgs, FamilyArg, GenArgs, GrowthArgs,
    Lambda0Args, MethodArg, MetricArgs, PotentialArgs, VerifyArgs,
};

fn parse_measure(s: &str) -> Result<MeasureConvention, Failure> {
    match s {
        "unit" => Ok(MeasureConvention::Unit),
        "degree" => Ok(MeasureConvention::WeightedDegree),
        other => other.parse().map(MeasureConvention::Custom).map_err(|_| {
            Failure::Input(format!(
                "--measure: expected unit, degree or a number, got {other:?}"
            ))
        }),
    }
}

fn parse_spheres(s: &str) -> Result<SphereLaw, Failure> {
    let bad = || Failure::Input(format!("--spheres: cannot parse {s:?}"));
    if s == "square" {
        return Ok(SphereLaw::Square);
    }
    if let Some(p) = s.strip_prefix("power:") {
        return p.parse().map(SphereLaw::Power).map_err(|_| bad());
    }
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| bad()))
        .collect::<Result<_, _>>()
        .map(SphereLaw::Explicit)
}

pub fn gen(args: GenArgs, seed: u64) -> Result<(), Failure> {
    let measure = parse_measure(&args.measure)?;
    let family = match args.family {
        FamilyArg::Tree => GraphFamily::KRegularTree {
            k: args.k,
            radius: args.radius,
            measure,
        },
        FamilyArg::SphereTree => GraphFamily::TreeWithSphereEdges {
            k: args.k,
            radius: args.radius,
            measure,
        },
        FamilyArg::Antitree => GraphFamily::Antitree {
            spheres: parse_spheres(&args.spheres)?,
            radius: args.radius,
            measure,
        },
        FamilyArg::Path => GraphFamily::Path {
            radius: args.radius,
            measure,
        },
        FamilyArg::Random => {
            let mut spec = RandomSpec::new(args.vertices, seed);
            spec.edge_probability = args.edge_prob;
            spec.measure = match measure {
                MeasureConvention::Unit => RandomMeasure::Unit,
                MeasureConvention::WeightedDegree => RandomMeasure::WeightedDegree,
                MeasureConvention::Custom(_) => spec.measure,
            };
            spec.potential_range = match args.potential.as_deref() {
                None => None,
                Some(&[lo, hi]) => Some((lo, hi)),
                Some(_) => return Err(Failure::Input("--potential expects LO,HI".into())),
            };
            GraphFamily::RandomWeighted(spec)
        }
    };
    let graph = family.generate()?;
    let mut doc =
        serde_json::to_value(GraphDocument::from_graph(&graph)).expect("graph serializes");
    doc["family"] = serde_json::to_value(&family).expect("family serializes");
    doc["seed"] = json!(seed);
    io::write_json(args.out.as_ref(), &doc)
}

pub fn metric(args: MetricArgs, seed: u64) -> Result<(), Failure> {
    let (graph, _) = io::load_graph(&args.input.graph)?;
    let metric = io::load_metric(&graph, &args.input.metric, args.input.lengths.as_ref())?;
    let cert = metric.certify_intrinsic(&graph);
    let mut doc = serde_json::to_value(metric.to_document(&graph)).expect("metric serializes");
    doc["seed"] = json!(seed);
    doc["intrinsic"] = json!({
        "is_intrinsic": cert.is_intrinsic,
        "worst_vertex": cert.worst_vertex,
        "min_slack": cert.min_slack(),
        "tolerance": cert.tolerance,
    });
    io::write_json(args.out.as_ref(), &doc)?;
    if cert.is_intrinsic {
        Ok(())
    } else {
        Err(Failure::Certificate(1))
    }
}

#[derive(Serialize)]
struct CutRow {
    r: Option<f64>,
    boundary: f64,
    volume: f64,
    ratio: f64,
}

impl CutRow {
    fn new(r: Option<f64>, cut: &CutReport) -> Self {
        Self {
            r,
            boundary: cut.boundary_measure,
            volume: cut.volume,
            ratio: cut.ratio,
        }
    }
}

fn json_line(seed: u64, value: impl Serialize) -> String {
    let mut value = serde_json::to_value(value).expect("results serialize");
    value["seed"] = json!(seed);
    let mut line = value.to_string();
    line.push('\n');
    line
}

pub fn cheeger(args: CheegerArgs, seed: u64) -> Result<(), Failure> {
    let (graph, _) = io::load_graph(&args.input.graph)?;
    let metric = io::load_metric(&graph, &args.input.metric, args.input.lengths.as_ref())?;
    let subset = io::subset_or_all(&graph, &args.subset)?;
    let (lines, rows) = match args.mode() {
        CheegerModeArg::Balls => {
            let kind = if args.combinatorial {
                BallKind::Combinatorial
            } else {
                BallKind::Metric
            };
            let balls =
                isoperimetry::cheeger_balls(&graph, &metric, args.center, &args.radii, kind)?;
            let lines: String = args
                .radii
                .iter()
                .zip(&balls)
                .map(|(r, cut)| {
                    let mut v = serde_json::to_value(cut).expect("cut serializes");
                    v["r"] = json!(r);
                    json_line(seed, v)
                })
                .collect();
            let rows = args
                .radii
                .iter()
                .zip(&balls)
                .map(|(&r, cut)| CutRow::new(Some(r), cut))
                .collect();
            (lines, rows)
        }
        mode => {
            let result = match mode {
                CheegerModeArg::Sweep => isoperimetry::cheeger_sweep(&graph, &metric, &subset)?,
                _ => isoperimetry::cheeger_exact(&graph, &metric, &subset, args.max_size)?,
            };
            let cut = isoperimetry::boundary(&graph, &metric, &result.optimal_set)?;
            (json_line(seed, &result), vec![CutRow::new(None, &cut)])
        }
    };
    if let Some(path) = &args.csv {
        io::write_csv(path, seed, &rows)?;
    }
    io::write_text(args.out.as_ref(), &lines)
}

pub fn lambda0(args: Lambda0Args, seed: u64) -> Result<(), Failure> {
    let (graph, _) = io::load_graph(&args.graph)?;
    let subset = io::subset_or_all(&graph, &args.subset)?;
    let form = FormMatrix::assemble(&graph, &subset)?;
    let method = match args.method {
        MethodArg::Auto => SolverMethod::Auto,
        MethodArg::Dense => SolverMethod::Dense,
        MethodArg::Iterative => SolverMethod::Iterative,
    };
    let result = spectral::lambda0_with(&form, method)?;
    io::write_json(args.out.as_ref(), &Envelope::new("lambda0", seed, result))
}

#[derive(Serialize)]
struct CurvatureRow {
    vertex: usize,
    sphere: Option<usize>,
    #[serde(rename = "K")]
    k: f64,
    #[serde(rename = "minus_K")]
    minus_k: f64,
}

pub fn curvature(args: CurvatureArgs, seed: u64) -> Result<(), Failure> {
    let (graph, _) = io::load_graph(&args.input.graph)?;
    let metric = io::load_metric(&graph, &args.input.metric, args.input.lengths.as_ref())?;
    let subset = io::subset_or_all(&graph, &args.subset)?;
    let orientation = Orientation::spheres(&graph, args.root)?;
    let field = curvature::curvature(&graph, &metric, &orientation, &subset);
    if let Some(path) = &args.csv {
        let hops = graph.hop_distances(args.root);
        let rows: Vec<_> = graph
            .vertices()
            .map(|x| CurvatureRow {
                vertex: x,
                sphere: hops[x],
                k: field.curvature[x],
                minus_k: -field.curvature[x],
            })
            .collect();
        io::write_csv(path, seed, &rows)?;
    }
    if let Some(path) = &args.orientation {
        let mut doc = serde_json::to_value(orientation.to_document(&graph)).expect("serializes");
        doc["seed"] = json!(seed);
        io::write_json(Some(path), &doc)?;
    }
    let certificate = if args.certify {
        Some(curvature::verify_curvature_bound(
            &graph,
            &metric,
            &orientation,
            &subset,
            args.max_size,
        )?)
    } else {
        None
    };
    let failed = certificate
        .as_ref()
        .is_some_and(CertificateRecord::is_failure);
    let result = json!({
        "k_lower": field.k_lower,
        "vertex_set": field.vertex_set,
        "curvature": field.curvature,
        "certificate": certificate,
    });
    io::write_json(args.out.as_ref(), &Envelope::new("curvature", seed, result))?;
    if failed {
        Err(Failure::Certificate(1))
    } else {
        Ok(())
    }
}

#[derive(Serialize)]
struct GrowthRow {
    r: f64,
    inf_value: f64,
}

pub fn growth(args: GrowthArgs, seed: u64) -> Result<(), Failure> {
    let (graph, family) = io::load_graph(&args.input.graph)?;
    let metric = io::load_metric(&graph, &args.input.metric, args.input.lengths.as_ref())?;
    let centers: Vec<usize> = if args.all_centers {
        graph.vertices().collect()
    } else {
        io::subset_or_all(&graph, &args.centers)?
    };
    let estimate = growth::volume_growth(&graph, &metric, &centers, &args.radii)?;
    if let Some(path) = &args.csv {
        let rows: Vec<_> = estimate
            .per_radius
            .iter()
            .map(|p| GrowthRow {
                r: p.r,
                inf_value: p.value,
            })
            .collect();
        io::write_csv(path, seed, &rows)?;
    }
    let certificate = match args.alpha_lower {
        Some(alpha) => Some(growth::verify_growth_bound(
            &graph,
            &metric,
            family.as_ref(),
            alpha,
            &args.radii,
            args.slack,
        )?),
        None => None,
    };
    let failed = certificate
        .as_ref()
        .is_some_and(CertificateRecord::is_failure);
    let result = json!({ "estimate": estimate, "certificate": certificate });
    io::write_json(args.out.as_ref(), &Envelope::new("growth", seed, result))?;
    if failed {
        Err(Failure::Certificate(1))
    } else {
        Ok(())
    }
}

pub fn potential(args: PotentialArgs, seed: u64) -> Result<(), Failure> {
    let (graph, _) = io::load_graph(&args.graph)?;
    let metric = io::load_metric(&graph, &args.metric, args.lengths.as_ref())?;
    let subset = io::subset_or_all(&graph, &args.subset)?;
    let delta = potentials::adapt_delta(&graph, &metric)?;
    let doubled = potentials::double(&graph, &metric, &delta)?;
    if let Some(path) = &args.doubled {
        let mut doc = serde_json::to_value(doubled.to_document()).expect("serializes");
        doc["seed"] = json!(seed);
        io::write_json(Some(path), &doc)?;
    }
    let variant = match args.boundary {
        BoundaryArg::PerVertex => PotentialBoundary::PerVertex,
        BoundaryArg::PerBoundaryPair => PotentialBoundary::PerBoundaryPair,
    };
    let records = vec![
        potentials::verify_potential_form_identity(&doubled, args.trials, seed),
        potentials::verify_potential_cheeger(&doubled, &subset, args.max_size, variant)?,
    ];
    let failed = records.iter().filter(|r| r.is_failure()).count();
    let result = json!({ "delta": delta, "records": records });
    io::write_json(args.out.as_ref(), &Envelope::new("potential", seed, result))?;
    if failed > 0 {
        Err(Failure::Certificate(failed))
    } else {
        Ok(())
    }
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    failures: usize,
    suites: Vec<SuiteReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph: Option<Vec<CertificateRecord>>,
}

/// Certificates for a user graph: the Cheeger pair on `U`, plus the
/// potential bound when the graph carries a potential.
fn graph_records(
    args: &VerifyArgs,
    path: &std::path::Path,
) -> Result<Vec<CertificateRecord>, Failure> {
    let (graph, _) = io::load_graph(path)?;
    let metric = io::load_metric(&graph, &args.metric, args.lengths.as_ref())?;
    let subset = io::subset_or_all(&graph, &args.subset)?;
    let mut records = verify::verify_cheeger(&graph, &metric, &subset, args.max_size)?;
    if graph.has_potential() {
        let delta = potentials::adapt_delta(&graph, &metric)?;
        let doubled = potentials::double(&graph, &metric, &delta)?;
        records.push(potentials::verify_potential_cheeger(
            &doubled,
            &subset,
            args.max_size,
            PotentialBoundary::PerVertex,
        )?);
    }
    Ok(records)
}

pub fn verify(args: VerifyArgs, seed: u64) -> Result<(), Failure> {
    let names: Vec<SuiteName> = match args.suite.as_str() {
        "all" => SuiteName::ALL.to_vec(),
        other => vec![other.parse()?],
    };
    let graph = match &args.graph {
        Some(path) => Some(graph_records(&args, path)?),
        None => None,
    };
    let suites = names
        .par_iter()
        .map(|&name| suite::run(name, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let failures = suites
        .iter()
        .flat_map(|s| s.failures())
        .chain(graph.iter().flatten().filter(|r| r.is_failure()))
        .count();
    let report = VerifyReport {
        passed: failures == 0,
        failures,
        suites,
        graph,
    };
    let envelope = Envelope::new("verify", seed, report);
    io::write_json(args.out.as_ref(), &envelope)?;
    for suite in &envelope.result.suites {
        eprintln!(
            "{:<16} {:>5} records  {}",
            suite.suite.name(),
            suite.records.len(),
            if suite.passed() { "pass" } else { "FAIL" }
        );
    }
    if failures > 0 {
        Err(Failure::Certificate(failures))
    } else {
        Ok(())
    }
}
