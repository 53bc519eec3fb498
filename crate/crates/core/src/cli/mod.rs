//! Command-line front end.
//!
//! Exit codes: 0 success or equivalent, 1 not equivalent, 2 invalid input or
//! failed computation, 3 ambiguous match. Results go to stdout as canonical
//! JSON; diagnostics go to stderr.

pub mod format;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::actions::{admits_projective, doubled_invariants, is_hopf, ActionDescriptor};
use crate::circlefield::{CircleField, Domain, IntervalField, TOL_ZERO_EXACT};
use crate::error::{Error, Result};
use crate::invariants::{
    canonical_key, equivalent_interval, equivalent_invariants, interval_invariants,
    invariants_with, CanonicalKey, HitchinInvariants, IntervalInvariants,
};
use crate::lattice::{self, GluingGraph};
use format::{canonical, AnyField, Artifact, GraphSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_EQUIVALENT: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_AMBIGUOUS: u8 = 3;

const CSV_SAMPLES: usize = 1024;

#[derive(Debug, Parser)]
#[command(
    name = "sln-atlas",
    version,
    about = "Circle-field invariants and SL(n,R)-action classification"
)]
struct Cli {
    /// Relative zero threshold.
    #[arg(long, global = true, default_value_t = TOL_ZERO_EXACT)]
    tol_zero: f64,
    /// Relative tolerance for invariant comparisons.
    #[arg(
        long,
        global = true,
        env = "SLN_ATLAS_TOL_MATCH",
        default_value_t = 1e-6
    )]
    tol_match: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Invariants of a field file.
    Invariants {
        path: PathBuf,
        /// JSON output (the default).
        #[arg(long)]
        json: bool,
        /// Also write 1024 `theta,f` samples to this file.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Equivalence of two fields, actions or graphs.
    Equiv { a: PathBuf, b: PathBuf },
    /// Classification of an action file.
    Classify { path: PathBuf },
    /// Gluing-graph operations.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Rewrites any schema file in canonical form.
    Canon { path: PathBuf },
}

#[derive(Debug, Subcommand)]
enum LatticeCommand {
    Check { path: PathBuf },
    Level { path: PathBuf },
    Volume { path: PathBuf },
    Topology { path: PathBuf },
    Equiv { a: PathBuf, b: PathBuf },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    if !(cli.tol_zero > 0.0 && cli.tol_match > 0.0) {
        let _ = writeln!(stderr, "error: tolerances must be positive");
        return EXIT_INVALID;
    }
    match dispatch(&cli, stderr) {
        Ok((code, value)) => {
            let _ = stdout.write_all(canonical(&value).as_bytes());
            code
        }
        Err(Failure::Error(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            if matches!(e, Error::AmbiguousMatch(_)) {
                EXIT_AMBIGUOUS
            } else {
                EXIT_INVALID
            }
        }
        Err(Failure::Reported) => EXIT_INVALID,
    }
}

enum Failure {
    Error(Error),
    /// Diagnostics were already written to stderr.
    Reported,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type Outcome = std::result::Result<(u8, Value), Failure>;

fn load(path: &Path) -> Result<Artifact> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    Artifact::parse(&text)
}

fn dispatch(cli: &Cli, stderr: &mut dyn Write) -> Outcome {
    match &cli.command {
        Command::Invariants { path, csv, .. } => cmd_invariants(path, csv.as_deref(), cli),
        Command::Equiv { a, b } => cmd_equiv(a, b, cli),
        Command::Classify { path } => cmd_classify(path),
        Command::Lattice { command } => cmd_lattice(command, cli, stderr),
        Command::Canon { path } => Ok((EXIT_OK, load(path)?.to_value())),
    }
}

fn key_json(key: &CanonicalKey) -> Value {
    json!({
        "k": key.k,
        "mu": key.mu,
        "sigma": key.sigma,
        "near_tie": key.near_tie,
        "sequence": key.sequence.iter().map(|&(m, r)| json!({"m": m, "r": r})).collect::<Vec<_>>(),
    })
}

fn invariants_json(inv: &HitchinInvariants, tol_match: f64) -> Value {
    json!({
        "k": inv.k,
        "sigma": inv.sigma,
        "mu": inv.mu,
        "zeros": inv.zeros.iter().map(|z| json!({"theta": z.theta, "m": z.order, "r": z.residue})).collect::<Vec<_>>(),
        "canonical": key_json(&canonical_key(inv, tol_match)),
    })
}

fn interval_json(inv: &IntervalInvariants) -> Value {
    json!({
        "records": inv.records.iter().map(|z| json!({"t": z.t, "m": z.order, "r": z.residue})).collect::<Vec<_>>(),
        "gaps": inv.gaps,
    })
}

fn field_of(artifact: Artifact) -> Result<AnyField> {
    match artifact {
        Artifact::Field(f) => f.to_field(),
        other => Err(Error::InvalidInput(format!(
            "expected a field file, got {}",
            other.schema()
        ))),
    }
}

type Sampler<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

fn write_csv(path: &Path, field: &AnyField) -> Result<()> {
    let (header, lo, hi, eval): (&str, f64, f64, Sampler<'_>) = match field {
        AnyField::Circle(f) => (
            "theta,f",
            0.0,
            std::f64::consts::TAU,
            Box::new(|t| f.value(t)),
        ),
        AnyField::Interval(f) => {
            let (a, b) = f.domain().bounds();
            ("t,x", a, b, Box::new(|t| f.eval(t)))
        }
    };
    // the circle grid omits 2π, the interval grid includes both ends
    let steps = match field {
        AnyField::Circle(_) => CSV_SAMPLES,
        AnyField::Interval(_) => CSV_SAMPLES - 1,
    };
    let mut text = String::from(header);
    text.push('\n');
    for i in 0..CSV_SAMPLES {
        let t = lo + (hi - lo) * i as f64 / steps as f64;
        text.push_str(&format!("{t:.16e},{:.16e}\n", eval(t)));
    }
    fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn cmd_invariants(path: &Path, csv: Option<&Path>, cli: &Cli) -> Outcome {
    let field = field_of(load(path)?)?;
    let value = match &field {
        AnyField::Circle(f) => invariants_json(&invariants_with(f, cli.tol_zero)?, cli.tol_match),
        AnyField::Interval(f) => interval_json(&interval_invariants(f, cli.tol_zero)?),
    };
    if let Some(p) = csv {
        write_csv(p, &field)?;
    }
    Ok((EXIT_OK, value))
}

fn verdict(kind: &str, result: Result<bool>, keys: Vec<Value>, tol_match: f64) -> Outcome {
    let (code, word, detail) = match result {
        Ok(true) => (EXIT_OK, "equivalent", Value::Null),
        Ok(false) => (EXIT_NOT_EQUIVALENT, "not_equivalent", Value::Null),
        Err(Error::AmbiguousMatch(m)) => (EXIT_AMBIGUOUS, "ambiguous", Value::String(m)),
        Err(e) => return Err(e.into()),
    };
    Ok((
        code,
        json!({"artifact": kind, "verdict": word, "detail": detail, "keys": keys, "tol_match": tol_match}),
    ))
}

fn circle_key(f: &CircleField, cli: &Cli) -> Result<(HitchinInvariants, Value)> {
    let inv = invariants_with(f, cli.tol_zero)?;
    let key = key_json(&canonical_key(&inv, cli.tol_match));
    Ok((inv, key))
}

fn action_key(a: &ActionDescriptor, cli: &Cli) -> Value {
    let mut v = classification_json(a);
    let inv = match a {
        ActionDescriptor::TypeI(x) => invariants_with(x.field(), cli.tol_zero).ok(),
        ActionDescriptor::TypeII(x) => doubled_invariants(x).ok(),
        ActionDescriptor::Transitive { .. } => None,
    };
    if let Some(inv) = inv {
        v["invariants"] = key_json(&canonical_key(&inv, cli.tol_match));
    }
    v
}

fn graph_key(g: &GluingGraph) -> Value {
    json!({
        "level": lattice::level(g),
        "nodes": g.nodes.len(),
        "attachments": g.attachments.len(),
        "components": lattice::summarize_topology(g).components.len(),
    })
}

fn cmd_equiv(a: &Path, b: &Path, cli: &Cli) -> Outcome {
    let (x, y) = (load(a)?, load(b)?);
    if x.schema() != y.schema() {
        return Err(Error::InvalidInput(format!(
            "cannot compare {} with {}",
            x.schema(),
            y.schema()
        ))
        .into());
    }
    match (x, y) {
        (Artifact::Field(fx), Artifact::Field(fy)) => match (fx.to_field()?, fy.to_field()?) {
            (AnyField::Circle(f), AnyField::Circle(g)) => {
                let (ia, ka) = circle_key(&f, cli)?;
                let (ib, kb) = circle_key(&g, cli)?;
                verdict(
                    "field",
                    equivalent_invariants(&ia, &ib, cli.tol_match),
                    vec![ka, kb],
                    cli.tol_match,
                )
            }
            (AnyField::Interval(f), AnyField::Interval(g)) => {
                let keys = vec![
                    interval_json(&interval_invariants(&f, cli.tol_zero)?),
                    interval_json(&interval_invariants(&g, cli.tol_zero)?),
                ];
                let flip = f.domain() == Domain::Full && g.domain() == Domain::Full;
                let result = if f.domain() == g.domain() {
                    equivalent_interval(&f, &g, flip, cli.tol_match)
                } else {
                    Ok(false)
                };
                verdict("field", result, keys, cli.tol_match)
            }
            _ => Err(Error::InvalidInput(
                "cannot compare a circle field with an interval field".into(),
            )
            .into()),
        },
        (Artifact::Action(ax), Artifact::Action(ay)) => {
            let (p, q) = (ax.to_descriptor()?, ay.to_descriptor()?);
            let keys = vec![action_key(&p, cli), action_key(&q, cli)];
            verdict(
                "action",
                crate::actions::equivalent_actions(&p, &q, cli.tol_match),
                keys,
                cli.tol_match,
            )
        }
        (Artifact::Graph(gx), Artifact::Graph(gy)) => graph_equiv(&gx, &gy, cli),
        _ => unreachable!("schemas checked equal"),
    }
}

fn graph_equiv(gx: &GraphSpec, gy: &GraphSpec, cli: &Cli) -> Outcome {
    let (g, h) = (gx.to_graph()?, gy.to_graph()?);
    lattice::ensure_valid(&g)?;
    lattice::ensure_valid(&h)?;
    let keys = vec![graph_key(&g), graph_key(&h)];
    verdict(
        "graph",
        lattice::equivalent_graphs(&g, &h, cli.tol_match),
        keys,
        cli.tol_match,
    )
}

fn classification_json(a: &ActionDescriptor) -> Value {
    let c = a.classify();
    let case = match c.case {
        Some(k) => json!(k),
        None => json!(c.label),
    };
    json!({
        "n": a.n(),
        "type": c.kind,
        "case": case,
        "manifold": c.manifold,
        "fixed_points": c.fixed_points,
        "is_hopf": is_hopf(a),
        "admits_projective": admits_projective(a),
    })
}

fn cmd_classify(path: &Path) -> Outcome {
    match load(path)? {
        Artifact::Action(spec) => Ok((EXIT_OK, classification_json(&spec.to_descriptor()?))),
        other => Err(Error::InvalidInput(format!(
            "expected an action file, got {}",
            other.schema()
        ))
        .into()),
    }
}

fn load_graph(path: &Path) -> Result<GluingGraph> {
    match load(path)? {
        Artifact::Graph(spec) => spec.to_graph(),
        other => Err(Error::InvalidInput(format!(
            "expected a graph file, got {}",
            other.schema()
        ))),
    }
}

fn diagnostics_json(g: &GluingGraph, diags: &[lattice::Diagnostic]) -> Value {
    Value::Array(
        diags
            .iter()
            .map(|d| {
                json!({
                    "attachment": d.attachment,
                    "node": d.site.and_then(|s| g.nodes.get(s.node)).map(|n| n.id.clone()),
                    "point": d.site.map(|s| s.point),
                    "message": d.message,
                })
            })
            .collect(),
    )
}

/// Loads a graph and reports its diagnostics on stderr if it is invalid.
fn valid_graph(path: &Path, stderr: &mut dyn Write) -> std::result::Result<GluingGraph, Failure> {
    let g = load_graph(path)?;
    let diags = lattice::validate_graph(&g);
    if diags.is_empty() {
        return Ok(g);
    }
    for d in &diags {
        let _ = writeln!(stderr, "invalid graph {}: {}", path.display(), d.message);
    }
    Err(Failure::Reported)
}

fn cmd_lattice(command: &LatticeCommand, cli: &Cli, stderr: &mut dyn Write) -> Outcome {
    match command {
        LatticeCommand::Check { path } => {
            let g = load_graph(path)?;
            let diags = lattice::validate_graph(&g);
            for d in &diags {
                let _ = writeln!(stderr, "invalid graph {}: {}", path.display(), d.message);
            }
            let code = if diags.is_empty() {
                EXIT_OK
            } else {
                EXIT_INVALID
            };
            Ok((
                code,
                json!({"valid": diags.is_empty(), "diagnostics": diagnostics_json(&g, &diags)}),
            ))
        }
        LatticeCommand::Level { path } => {
            let g = valid_graph(path, stderr)?;
            Ok((EXIT_OK, json!({"level": lattice::level(&g)})))
        }
        LatticeCommand::Volume { path } => {
            let g = valid_graph(path, stderr)?;
            Ok((
                EXIT_OK,
                json!({"volume_preserving": lattice::is_volume_preserving(&g)}),
            ))
        }
        LatticeCommand::Topology { path } => {
            let g = valid_graph(path, stderr)?;
            let components: Vec<Value> = lattice::summarize_topology(&g)
                .components
                .iter()
                .map(|c| {
                    json!({
                        "nodes": c.nodes.iter().map(|&i| g.nodes[i].id.clone()).collect::<Vec<_>>(),
                        "tori": c.tori,
                        "edges": c.edges,
                        "cycle_rank": c.cycle_rank,
                        "label": c.label,
                        "extension": c.extension,
                    })
                })
                .collect();
            Ok((EXIT_OK, json!({"components": components})))
        }
        LatticeCommand::Equiv { a, b } => {
            let g = valid_graph(a, stderr)?;
            let h = valid_graph(b, stderr)?;
            let keys = vec![graph_key(&g), graph_key(&h)];
            verdict(
                "graph",
                lattice::equivalent_graphs(&g, &h, cli.tol_match),
                keys,
                cli.tol_match,
            )
        }
    }
}

/// Canonical text of a graph, for writing fixtures.
pub fn graph_text(g: &GluingGraph) -> String {
    canonical(&Artifact::Graph(GraphSpec::from_graph(g)).to_value())
}

/// Canonical text of an interval field file.
pub fn interval_field_text(f: &IntervalField) -> String {
    canonical(&Artifact::Field(format::FieldSpec::from_interval(f)).to_value())
}
