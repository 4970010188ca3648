use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod io;

use io::Failure;

/// Isoperimetric constants, Dirichlet ground states and their certificates
/// for weighted graphs with intrinsic metrics.
#[derive(Parser)]
#[command(name = "cheeger", version)]
struct Cli {
    /// Seed for every random choice; recorded in all outputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (falls back to CHEEGER_THREADS, then RAYON_NUM_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a family truncation or a seeded random graph as graph JSON
    Gen(GenArgs),
    /// Build a metric and check that it is intrinsic
    Metric(MetricArgs),
    /// Cheeger constant of a vertex set
    Cheeger(CheegerArgs),
    /// Bottom of the Dirichlet spectrum on a vertex set
    Lambda0(Lambda0Args),
    /// Oriented curvature with respect to spheres around a root
    Curvature(CurvatureArgs),
    /// Finite-radius exponential volume growth
    Growth(GrowthArgs),
    /// Doubled graph of a graph with potential and its certificates
    Potential(PotentialArgs),
    /// Run verification suites and write a JSON report
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Tree,
    SphereTree,
    Antitree,
    Path,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Forward degree of the tree families.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    radius: usize,
    /// `unit`, `degree` or a positive constant.
    #[arg(long, default_value = "degree")]
    measure: String,
    /// Antitree sphere sizes: `square`, `power:P` or `1,4,9,...`.
    #[arg(long, default_value = "square")]
    spheres: String,
    /// Vertex count of the random family.
    #[arg(long, default_value_t = 10)]
    vertices: usize,
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
    /// Potential range `LO,HI` for the random family.
    #[arg(long, value_delimiter = ',')]
    potential: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphInput {
    /// Graph JSON file.
    #[arg(long)]
    graph: PathBuf,
    /// natural, canonical, inverse_degree or potential_adapted.
    #[arg(long, default_value = "canonical")]
    metric: String,
    /// Metric JSON with explicit edge lengths; overrides --metric.
    #[arg(long)]
    lengths: Option<PathBuf>,
}

#[derive(Args)]
struct MetricArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheegerModeArg {
    Exact,
    Balls,
    Sweep,
}

#[derive(Args)]
struct CheegerArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Vertex indices of U; defaults to every vertex.
    #[arg(long, value_delimiter = ',')]
    subset: Vec<usize>,
    #[arg(long, conflicts_with_all = ["balls", "sweep"])]
    exact: bool,
    #[arg(long, conflicts_with = "sweep")]
    balls: bool,
    #[arg(long)]
    sweep: bool,
    #[arg(long, default_value_t = cheeger_core::isoperimetry::DEFAULT_MAX_SIZE)]
    max_size: usize,
    /// Ball center.
    #[arg(long, default_value_t = 0)]
    center: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    radii: Vec<f64>,
    /// Balls in hop distance instead of the metric.
    #[arg(long)]
    combinatorial: bool,
    /// Table of cut reports: r, boundary, volume, ratio.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CheegerArgs {
    fn mode(&self) -> CheegerModeArg {
        if self.balls {
            CheegerModeArg::Balls
        } else if self.sweep {
            CheegerModeArg::Sweep
        } else {
            CheegerModeArg::Exact
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Dense,
    Iterative,
}

#[derive(Args)]
struct Lambda0Args {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_delimiter = ',')]
    subset: Vec<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, default_value_t = 0)]
    root: usize,
    /// Vertices where the lower bound is taken; defaults to every vertex.
    #[arg(long, value_delimiter = ',')]
    subset: Vec<usize>,
    /// Also certify alpha(U) >= k_lower by enumeration.
    #[arg(long)]
    certify: bool,
    #[arg(long, default_value_t = cheeger_core::isoperimetry::DEFAULT_MAX_SIZE)]
    max_size: usize,
    /// Per-vertex table: vertex, sphere, K, minus_K.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Signed edge list of the orientation.
    #[arg(long)]
    orientation: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GrowthArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    centers: Vec<usize>,
    /// Take the infimum over every vertex.
    #[arg(long, conflicts_with = "centers")]
    all_centers: bool,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
    radii: Vec<f64>,
    /// Certify 2 * alpha_lower <= mu_hat + slack around vertex 0.
    #[arg(long)]
    alpha_lower: Option<f64>,
    #[arg(long, default_value_t = cheeger_core::growth::DEFAULT_GROWTH_SLACK)]
    slack: f64,
    /// Table: r, inf_value.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    PerVertex,
    PerBoundaryPair,
}

#[derive(Args)]
struct PotentialArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "potential_adapted")]
    metric: String,
    #[arg(long)]
    lengths: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    subset: Vec<usize>,
    #[arg(long, value_enum, default_value = "per-vertex")]
    boundary: BoundaryArg,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = cheeger_core::isoperimetry::DEFAULT_MAX_SIZE)]
    max_size: usize,
    /// Doubled graph JSON with its pairing block.
    #[arg(long)]
    doubled: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// `all` or one of cheeger, strong, coarea, counterexample, curvature,
    /// potential, upper, growth, essential.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Also certify this graph.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value = "canonical")]
    metric: String,
    #[arg(long)]
    lengths: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    subset: Vec<usize>,
    #[arg(long, default_value_t = cheeger_core::isoperimetry::DEFAULT_MAX_SIZE)]
    max_size: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads(flag: Option<usize>) -> Result<(), Failure> {
    let threads = match flag {
        Some(n) => Some(n),
        None => match std::env::var("CHEEGER_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                Failure::Input(format!(
                    "CHEEGER_THREADS must be a positive integer, got {v:?}"
                ))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads(cli.threads).and_then(|()| {
        let seed = cli.seed;
        match cli.command {
            Command::Gen(args) => commands::gen(args, seed),
            Command::Metric(args) => commands::metric(args, seed),
            Command::Cheeger(args) => commands::cheeger(args, seed),
            Command::Lambda0(args) => commands::lambda0(args, seed),
            Command::Curvature(args) => commands::curvature(args, seed),
            Command::Growth(args) => commands::growth(args, seed),
            Command::Potential(args) => commands::potential(args, seed),
            Command::Verify(args) => commands::verify(args, seed),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
