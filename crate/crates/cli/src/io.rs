//! Input loading, output envelopes and exit codes.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use cheeger_core::{
    Error, GraphDocument, GraphFamily, MetricAssignment, MetricDocument, MetricRecipe,
    WeightedGraph,
};
use serde::Serialize;
use serde_json::Value;

pub enum Failure {
    /// Some applicable certificate failed.
    Certificate(usize),
    /// Unreadable or malformed input, bad arguments.
    Input(String),
    /// Capacity exceeded or a precondition of the requested computation fails.
    Precondition(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Certificate(_) => 1,
            Failure::Input(_) => 2,
            Failure::Precondition(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Certificate(n) => write!(f, "{n} certificate(s) failed"),
            Failure::Input(msg) | Failure::Precondition(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Capacity { .. }
            | Error::Precondition(_)
            | Error::Orientation(_)
            | Error::Convergence { .. }
            | Error::Unsupported(_) => Failure::Precondition(msg),
            _ => Failure::Input(msg),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_json(path: &Path) -> Result<Value, Failure> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Input(format!("{}: malformed JSON: {e}", path.display())))
}

/// Graph JSON, plus the generating family when `gen` recorded one.
pub fn load_graph(path: &Path) -> Result<(WeightedGraph, Option<GraphFamily>), Failure> {
    let value = parse_json(path)?;
    let family = match value.get("family") {
        Some(f) => Some(
            serde_json::from_value(f.clone())
                .map_err(|e| Failure::Input(format!("{}: family: {e}", path.display())))?,
        ),
        None => None,
    };
    let doc: GraphDocument = serde_json::from_value(value)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let graph = doc.into_graph()?;
    let report = graph.validate();
    if !report.is_valid() {
        return Err(Failure::Input(format!(
            "{}: invalid graph: {report}",
            path.display()
        )));
    }
    Ok((graph, family))
}

pub fn load_metric(
    graph: &WeightedGraph,
    recipe: &str,
    lengths: Option<&PathBuf>,
) -> Result<MetricAssignment, Failure> {
    match lengths {
        Some(path) => {
            let doc: MetricDocument = serde_json::from_value(parse_json(path)?)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Ok(doc.into_metric(graph)?)
        }
        None => Ok(MetricAssignment::build(
            graph,
            MetricRecipe::parse(recipe)?,
        )?),
    }
}

/// The given vertex indices, or every vertex when none are given.
pub fn subset_or_all(graph: &WeightedGraph, subset: &[usize]) -> Result<Vec<usize>, Failure> {
    if let Some(&x) = subset.iter().find(|&&x| x >= graph.vertex_count()) {
        return Err(Failure::Input(format!("vertex {x} out of range")));
    }
    Ok(if subset.is_empty() {
        graph.vertices().collect()
    } else {
        subset.to_vec()
    })
}

pub fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// `{command, seed, timestamp, result}`.
#[derive(Serialize)]
pub struct Envelope<T> {
    pub command: &'static str,
    pub seed: u64,
    pub timestamp: u64,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &'static str, seed: u64, result: T) -> Self {
        Self {
            command,
            seed,
            timestamp: timestamp(),
            result,
        }
    }
}

pub fn write_text(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

pub fn write_json(out: Option<&PathBuf>, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("outputs serialize");
    text.push('\n');
    write_text(out, &text)
}

/// CSV with a leading `# seed=` comment line.
pub fn write_csv<R: Serialize>(path: &Path, seed: u64, rows: &[R]) -> Result<(), Failure> {
    let io_err = |e: &dyn fmt::Display| Failure::Input(format!("{}: {e}", path.display()));
    let mut file = fs::File::create(path).map_err(|e| io_err(&e))?;
    writeln!(file, "# seed={seed}").map_err(|e| io_err(&e))?;
    let mut writer = csv::Writer::from_writer(file);
    for row in rows {
        writer.serialize(row).map_err(|e| io_err(&e))?;
    }
    writer.flush().map_err(|e| io_err(&e))
}
