//! Subcommands of the `fkr` binary. Every command reads and writes JSON.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fkr_core::fk::fk_invariant;
use fkr_core::graphcore::{graph_from_json, Graph};
use fkr_core::intlin::IntMatrix;
use fkr_core::lift::{lift_poset, transvections, KWebIso, Lift, DEFAULT_BUDGET};
use fkr_core::moves::{
    check_certificate, col_add, cuntz_splice, cuntz_splice_twice, edge_expand, enlarge_block, row_add, splice_graph,
    splice_twice_graph, standardize, MoveCertificate,
};
use fkr_core::posetblock::{block_matrix_from_json, BlockMatrix};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::pipeline::{compare, CompareOptions};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

/// Key added to graphs written by `splice --uncertified`.
pub const UNCERTIFIED_KEY: &str = "uncertified";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl From<fkr_core::Error> for CliError {
    fn from(e: fkr_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "fkr", version, about = "Filtered K-theory of graphs with certified moves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the reduced filtered K-theory of a graph.
    Invariant { graph: PathBuf },
    /// Apply one certified move.
    Move(MoveArgs),
    /// Attach the Cuntz splice gadget at a vertex.
    Splice {
        graph: PathBuf,
        vertex: String,
        /// Attach the four-vertex double gadget instead.
        #[arg(long)]
        twice: bool,
        /// Write only the graph, marked as uncertified, with no certificate.
        #[arg(long)]
        uncertified: bool,
        #[command(flatten)]
        out: Outputs,
    },
    /// Replace the edge SOURCE → RANGE by a path of length two.
    Expand {
        graph: PathBuf,
        source: String,
        range: String,
        #[command(flatten)]
        out: Outputs,
    },
    /// Grow a diagonal block of a standard-form graph by one vertex.
    Enlarge {
        graph: PathBuf,
        component: usize,
        #[command(flatten)]
        out: Outputs,
    },
    /// Replay a certificate: exit 0 if valid, 1 if not.
    Verify { certificate: PathBuf },
    /// Compare two graphs; exit 0 isomorphic, 1 not, 2 inconclusive.
    Compare {
        first: PathBuf,
        second: PathBuf,
        /// Also decide whether the unit class is preserved.
        #[arg(long)]
        unital: bool,
        /// Build a replayable move chain (the default).
        #[arg(long, overrides_with = "no_certify")]
        certify: bool,
        /// Stop at the invariant-level comparison.
        #[arg(long)]
        no_certify: bool,
        #[arg(long, env = "FKR_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lift a K-web isomorphism to a GL_P-equivalence.
    Lift {
        request: PathBuf,
        /// Overrides the budget in the request.
        #[arg(long, env = "FKR_BUDGET")]
        budget: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Factor an SL_P block matrix into unit transvections.
    Factor { matrix: PathBuf },
}

#[derive(Debug, Args)]
pub struct Outputs {
    /// Where to write the target graph.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the certificate.
    #[arg(long)]
    pub cert: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "kind", required = true, multiple = false)]
pub struct MoveKindArgs {
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pub row_add: Option<Vec<String>>,
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pub col_add: Option<Vec<String>>,
    #[arg(long, num_args = 2, value_names = ["SOURCE", "RANGE"])]
    pub expand: Option<Vec<String>>,
    #[arg(long, value_name = "U")]
    pub splice: Option<String>,
    #[arg(long, value_name = "U")]
    pub splice_twice: Option<String>,
    #[arg(long, value_name = "COMPONENT")]
    pub enlarge: Option<usize>,
    #[arg(long)]
    pub standardize: bool,
}

#[derive(Debug, Args)]
pub struct MoveArgs {
    pub graph: PathBuf,
    #[command(flatten)]
    pub kind: MoveKindArgs,
    #[command(flatten)]
    pub out: Outputs,
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: malformed JSON: {e}", path.display())))
}

fn is_matrix(v: &Value) -> bool {
    v.get("rows").is_some() && v.get("cols").is_some() && v.get("entries").is_some()
}

/// A graph JSON object, or a bare nonnegative matrix read as an adjacency matrix
/// with vertices `0..n`.
pub fn graph_from_value(v: &Value) -> CliResult<Graph> {
    if is_matrix(v) {
        return Ok(graph_from_json(&json!({ "adjacency": v }))?);
    }
    Ok(graph_from_json(v)?)
}

pub fn load_graph(path: &Path) -> CliResult<Graph> {
    graph_from_value(&read_json(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Data(e.to_string()))
        }
    }
}

/// The invariant JSON for a graph, exactly as `invariant` prints it.
pub fn invariant_text(g: &Graph) -> CliResult<String> {
    Ok(pretty(&fk_invariant(g)?.to_json()))
}

fn write_move(target: &Graph, cert: &MoveCertificate, out: &Outputs) -> CliResult<()> {
    match (&out.out, &out.cert) {
        (None, None) => emit(None, &pretty(&json!({ "target": target, "certificate": cert }))),
        (o, c) => {
            if let Some(o) = o {
                emit(Some(o), &pretty(target))?;
            }
            match c {
                Some(c) => emit(Some(c), &pretty(cert)),
                None => emit(None, &pretty(cert)),
            }
        }
    }
}

fn run_move(args: &MoveArgs) -> CliResult<i32> {
    let g = load_graph(&args.graph)?;
    let k = &args.kind;
    let pair = |p: &[String]| (p[0].clone(), p[1].clone());
    let (target, cert) = if let Some(p) = &k.row_add {
        let (u, v) = pair(p);
        row_add(&g, &u, &v)?
    } else if let Some(p) = &k.col_add {
        let (u, v) = pair(p);
        col_add(&g, &u, &v)?
    } else if let Some(p) = &k.expand {
        let (s, r) = pair(p);
        edge_expand(&g, &s, &r)?
    } else if let Some(u) = &k.splice {
        cuntz_splice(&g, u)?
    } else if let Some(u) = &k.splice_twice {
        cuntz_splice_twice(&g, u)?
    } else if let Some(j) = k.enlarge {
        enlarge_block(&g, j)?
    } else if k.standardize {
        standardize(&g)?
    } else {
        return Err(CliError::Usage("no move given".into()));
    };
    write_move(&target, &cert, &args.out)?;
    Ok(0)
}

fn run_verify(path: &Path) -> CliResult<i32> {
    let v = read_json(path)?;
    let cert: MoveCertificate =
        serde_json::from_value(v).map_err(|e| CliError::Data(format!("{}: not a certificate: {e}", path.display())))?;
    let (code, report) = match check_certificate(&cert) {
        Ok(()) => (0, json!({ "valid": true })),
        Err(e) => (1, json!({ "valid": false, "reason": e.to_string() })),
    };
    emit(None, &pretty(&report))?;
    Ok(code)
}

#[derive(Deserialize)]
struct LiftRequest {
    #[serde(rename = "B")]
    b: Value,
    #[serde(rename = "Bprime")]
    b_prime: Value,
    kweb: KWebIso,
    #[serde(default)]
    budget: Option<u64>,
}

fn run_lift(path: &Path, budget: Option<u64>, seed: u64) -> CliResult<i32> {
    let req: LiftRequest = serde_json::from_value(read_json(path)?)
        .map_err(|e| CliError::Data(format!("{}: not a lift request: {e}", path.display())))?;
    let b = block_matrix_from_json(&req.b)?;
    let b2 = block_matrix_from_json(&req.b_prime)?;
    let budget = budget.or(req.budget).unwrap_or(DEFAULT_BUDGET);
    let (code, report) = match lift_poset(&b, &b2, &req.kweb, budget, seed)? {
        Lift::Found(e) => {
            if !e.verify(false) || !req.kweb.agrees_with(&KWebIso::induced(&e)?, &b2) {
                return Err(CliError::Data("lift failed its own verification".into()));
            }
            (0, json!({ "status": "found", "U": e.u.matrix(), "V": e.v.matrix() }))
        }
        Lift::Absent(why) => (1, json!({ "status": "absent", "reason": why })),
        Lift::Inconclusive(why) => (2, json!({ "status": "inconclusive", "reason": why })),
    };
    emit(None, &pretty(&report))?;
    Ok(code)
}

fn run_factor(path: &Path) -> CliResult<i32> {
    let u: BlockMatrix = block_matrix_from_json(&read_json(path)?)?;
    let ts = transvections(&u)?;
    let n = u.row_comp().len();
    let product = ts.iter().fold(IntMatrix::identity(n), |acc, t| &acc * &t.matrix(n));
    if product != *u.matrix() {
        return Err(CliError::Data("factor product differs from the input".into()));
    }
    emit(None, &pretty(&json!({ "size": n, "transvections": ts })))?;
    Ok(0)
}

pub fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Invariant { graph } => {
            let g = load_graph(&graph)?;
            emit(None, &invariant_text(&g)?)?;
            Ok(0)
        }
        Command::Move(args) => run_move(&args),
        Command::Splice { graph, vertex, twice, uncertified, out } => {
            let g = load_graph(&graph)?;
            if uncertified {
                if out.cert.is_some() {
                    return Err(CliError::Usage("--uncertified writes no certificate".into()));
                }
                let h = if twice { splice_twice_graph(&g, &vertex)? } else { splice_graph(&g, &vertex)? };
                let mut v = serde_json::to_value(&h).expect("graphs serialize");
                v[UNCERTIFIED_KEY] = Value::Bool(true);
                eprintln!("warning: uncertified splice, no certificate written");
                emit(out.out.as_deref(), &pretty(&v))?;
                return Ok(0);
            }
            let (h, c) = if twice { cuntz_splice_twice(&g, &vertex)? } else { cuntz_splice(&g, &vertex)? };
            write_move(&h, &c, &out)?;
            Ok(0)
        }
        Command::Expand { graph, source, range, out } => {
            let (h, c) = edge_expand(&load_graph(&graph)?, &source, &range)?;
            write_move(&h, &c, &out)?;
            Ok(0)
        }
        Command::Enlarge { graph, component, out } => {
            let (h, c) = enlarge_block(&load_graph(&graph)?, component)?;
            write_move(&h, &c, &out)?;
            Ok(0)
        }
        Command::Verify { certificate } => run_verify(&certificate),
        Command::Compare { first, second, unital, certify: _, no_certify, budget, seed } => {
            let (v1, v2) = (read_json(&first)?, read_json(&second)?);
            let g1 = graph_from_value(&v1).map_err(|e| CliError::Data(format!("{}: {e}", first.display())))?;
            let g2 = graph_from_value(&v2).map_err(|e| CliError::Data(format!("{}: {e}", second.display())))?;
            let opts = CompareOptions { unital, certify: !no_certify, budget, seed };
            let mut report = compare(&g1, &g2, &opts)?;
            for (name, v) in [(&first, &v1), (&second, &v2)] {
                if v.get(UNCERTIFIED_KEY) == Some(&Value::Bool(true)) {
                    report.log.push(format!("note: {} came from an uncertified splice", name.display()));
                }
            }
            emit(None, &pretty(&report))?;
            Ok(report.exit_code())
        }
        Command::Lift { request, budget, seed } => run_lift(&request, budget, seed),
        Command::Factor { matrix } => run_factor(&matrix),
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fkr: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(main_with(["fkr", "compare", "only-one.json"]), EXIT_USAGE);
        assert_eq!(main_with(["fkr", "frobnicate"]), EXIT_USAGE);
        assert_eq!(main_with(["fkr", "move", "g.json"]), EXIT_USAGE);
    }

    #[test]
    fn missing_file_is_a_data_error() {
        assert_eq!(main_with(["fkr", "invariant", "/nonexistent/g.json"]), EXIT_DATA);
    }

    #[test]
    fn bare_matrix_is_an_adjacency_matrix() {
        let v = json!({"rows": 2, "cols": 2, "entries": [[1, 1], [1, 1]]});
        let g = graph_from_value(&v).unwrap();
        assert_eq!(g.vertices(), ["0", "1"]);
        assert_eq!(g.adjacency().rows(), 2);
    }
}
