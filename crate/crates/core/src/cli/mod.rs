//! The `linetop` command-line tool.
//!
//! Every command prints a JSON report: the command line, a summary of the
//! input space, a command-specific payload, the list of violations and the
//! exit status. Exit status is 0 on success, 1 when checks fail or the answer
//! is negative, and 2 for usage or input errors (diagnostic on stderr).

pub mod dot;
pub mod format;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::atlas::{build_atlas, circular_order, Circularity};
use crate::generators::{from_betweenness, gen_standard, restricted_interval_structure, GenError, Shape};
use crate::order::{
    check_order_topology, check_subinterval_law, decompose, default_anchor, order_chart, OrderChart, OrderError,
    Sampling,
};
use crate::space::{PointId, Space, VertexSet};
use crate::splitting::{is_locally_flat, non_flat_set, sim_classes};
use crate::suites::{run_suite, Suite};

use dot::{export_dot, Annotation};
use format::{read_betweenness, read_space, InputError, SpaceFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "linetop",
    version,
    about = "Splitting analysis and order reconstruction on finite spaces"
)]
struct Cli {
    /// Write the report (or, for `gen`, the generated space) to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a Graphviz rendering of the space to this file.
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split counts, separation classes and local flatness of every point.
    Analyze { file: PathBuf },
    /// Remove non-flat points and order the remaining components.
    Decompose { file: PathBuf },
    /// Order a connected domain from an anchor and check the chart laws.
    Order {
        file: PathBuf,
        /// `all`, or comma-separated ids and ranges such as `2-9,12`.
        #[arg(long, default_value = "all")]
        domain: String,
        #[arg(long)]
        anchor: Option<usize>,
    },
    /// Local charts around every point.
    Atlas { file: PathBuf },
    /// Stitch the atlas into a cyclic order.
    Cyclic { file: PathBuf },
    /// Run a seeded verification suite.
    Verify {
        file: PathBuf,
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Recover a total order from a betweenness relation.
    Betweenness { file: PathBuf },
    /// Generate a space file.
    Gen {
        kind: GenKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        arms: Option<usize>,
        #[arg(long)]
        len: Option<usize>,
        /// Three comma-separated path lengths for `theta`.
        #[arg(long)]
        lengths: Option<String>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value = "1")]
        radii: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Path,
    Cycle,
    Star,
    Theta,
    RandomTree,
    ShortIntervals,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub edges: usize,
    pub basis_size: usize,
    pub k: usize,
}

impl Summary {
    pub fn of(space: &Space) -> Self {
        Summary {
            n: space.len(),
            edges: space.edges().len(),
            basis_size: space.basis().len(),
            k: space.max_basis_boundary(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub summary: Option<Summary>,
    pub payload: Value,
    pub violations: Vec<String>,
    pub exit_status: i32,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Result of running one command without touching stdout or the filesystem
/// (other than reading inputs).
#[derive(Clone, Debug)]
pub struct Execution {
    pub report: Option<Report>,
    /// Text for stdout when no report is printed (help, version, `gen` without `--out`).
    pub stdout: String,
    pub stderr: String,
    pub files: Vec<(PathBuf, String)>,
    pub exit_status: i32,
}

impl Execution {
    fn usage(message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Execution {
            report: None,
            stdout: String::new(),
            stderr,
            files: Vec::new(),
            exit_status: EXIT_USAGE,
        }
    }
}

struct Outcome {
    summary: Option<Summary>,
    payload: Value,
    violations: Vec<String>,
    negative: bool,
    dot: Option<String>,
}

impl Outcome {
    fn new(space: &Space, payload: Value) -> Self {
        Outcome {
            summary: Some(Summary::of(space)),
            payload,
            violations: Vec::new(),
            negative: false,
            dot: Some(export_dot(space, None)),
        }
    }
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("payload serializes")
}

/// Parses `args` (program name first) and runs the command.
pub fn execute<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Execution::usage(text)
            } else {
                Execution {
                    report: None,
                    stdout: text,
                    stderr: String::new(),
                    files: Vec::new(),
                    exit_status: EXIT_OK,
                }
            };
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();

    if let Command::Gen { .. } = cli.command {
        return run_gen(&cli, echo);
    }
    let outcome = match dispatch(&cli.command) {
        Ok(outcome) => outcome,
        Err(e) => return Execution::usage(format!("linetop: {e}")),
    };
    let exit_status = if outcome.violations.is_empty() && !outcome.negative {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    };
    let report = Report {
        command: echo,
        summary: outcome.summary,
        payload: outcome.payload,
        violations: outcome.violations,
        exit_status,
    };
    let mut files = Vec::new();
    let mut stdout = String::new();
    match &cli.out {
        Some(path) => files.push((path.clone(), report.to_json())),
        None => stdout = report.to_json(),
    }
    if let (Some(path), Some(text)) = (&cli.dot, outcome.dot) {
        files.push((path.clone(), text));
    }
    Execution {
        report: Some(report),
        stdout,
        stderr: String::new(),
        files,
        exit_status,
    }
}

/// Runs the tool, writing to the given streams and to any requested files.
/// Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let execution = execute(args);
    for (path, text) in &execution.files {
        if let Err(e) = fs::write(path, text) {
            let _ = writeln!(stderr, "linetop: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    let _ = stdout.write_all(execution.stdout.as_bytes());
    let _ = stderr.write_all(execution.stderr.as_bytes());
    execution.exit_status
}

#[derive(Debug, thiserror::Error)]
enum CommandError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Usage(String),
}

fn dispatch(command: &Command) -> Result<Outcome, CommandError> {
    match command {
        Command::Analyze { file } => analyze(&read_space(file)?),
        Command::Decompose { file } => run_decompose(&read_space(file)?),
        Command::Order { file, domain, anchor } => run_order(&read_space(file)?, domain, *anchor),
        Command::Atlas { file } => run_atlas(&read_space(file)?, false),
        Command::Cyclic { file } => run_atlas(&read_space(file)?, true),
        Command::Verify {
            file,
            suite,
            seed,
            samples,
        } => run_verify(&read_space(file)?, *suite, *seed, *samples),
        Command::Betweenness { file } => run_betweenness(file),
        Command::Gen { .. } => unreachable!("handled before dispatch"),
    }
}

fn analyze(space: &Space) -> Result<Outcome, CommandError> {
    let all = space.all();
    let mut outcome = Outcome::new(space, Value::Null);
    if !space.is_connected(&all) {
        outcome.violations.push("space is not connected".into());
        return Ok(outcome);
    }
    let mut points = Vec::new();
    for x in space.points() {
        let profile = sim_classes(space, &all, x).map_err(|e| CommandError::Usage(e.to_string()))?;
        let flatness = is_locally_flat(space, &all, x).map_err(|e| CommandError::Usage(e.to_string()))?;
        points.push(json!({
            "point": x,
            "split_count": profile.count,
            "classes": profile.classes.blocks,
            "flatness": flatness,
        }));
    }
    let non_flat = non_flat_set(space, &all).map_err(|e| CommandError::Usage(e.to_string()))?;
    outcome.payload = json!({ "points": points, "non_flat": non_flat });
    Ok(outcome)
}

fn chart_laws(space: &Space, chart: &OrderChart, violations: &mut Vec<String>) -> Value {
    let laws = [check_subinterval_law(space, chart), check_order_topology(space, chart)];
    for law in &laws {
        violations.extend(law.violations.iter().map(|v| format!("{}: {v}", law.law)));
    }
    to_value(&laws)
}

fn run_decompose(space: &Space) -> Result<Outcome, CommandError> {
    let mut outcome = Outcome::new(space, Value::Null);
    match decompose(space, &space.all()) {
        Ok(d) => {
            let laws: Vec<Value> = d
                .components
                .iter()
                .map(|c| chart_laws(space, c, &mut outcome.violations))
                .collect();
            outcome.payload = json!({ "removed": d.removed, "components": d.components, "laws": laws });
            outcome.dot = Some(export_dot(space, Some(Annotation::Decomposition(&d))));
        }
        Err(OrderError::Space(e)) => return Err(InputError::Space(e).into()),
        Err(e) => outcome.violations.push(e.to_string()),
    }
    Ok(outcome)
}

fn parse_domain(space: &Space, text: &str) -> Result<VertexSet, CommandError> {
    if text == "all" {
        return Ok(space.all());
    }
    let bad = || CommandError::Usage(format!("invalid --domain {text:?}"));
    let mut set = VertexSet::new();
    for part in text.split(',') {
        let part = part.trim();
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                set.extend((lo..=hi).map(PointId));
            }
            None => {
                set.insert(PointId(part.parse().map_err(|_| bad())?));
            }
        }
    }
    space.check_set(&set).map_err(InputError::Space)?;
    Ok(set)
}

fn run_order(space: &Space, domain: &str, anchor: Option<usize>) -> Result<Outcome, CommandError> {
    let domain = parse_domain(space, domain)?;
    let mut outcome = Outcome::new(space, Value::Null);
    let anchor = match anchor {
        Some(a) => {
            space.check_point(PointId(a)).map_err(InputError::Space)?;
            Some(PointId(a))
        }
        None => default_anchor(space, &domain),
    };
    let Some(anchor) = anchor else {
        outcome
            .violations
            .push(format!("no point of {domain} splits it into two"));
        outcome.payload = json!({ "domain": domain });
        return Ok(outcome);
    };
    match order_chart(space, &domain, anchor) {
        Ok(chart) => {
            let laws = chart_laws(space, &chart, &mut outcome.violations);
            outcome.payload = json!({ "chart": chart, "laws": laws });
        }
        Err(OrderError::Space(e)) => return Err(InputError::Space(e).into()),
        Err(e) => {
            outcome.violations.push(e.to_string());
            outcome.payload = json!({ "domain": domain, "anchor": anchor });
        }
    }
    Ok(outcome)
}

fn run_atlas(space: &Space, cyclic: bool) -> Result<Outcome, CommandError> {
    let mut outcome = Outcome::new(space, Value::Null);
    match build_atlas(space, &space.all()) {
        Ok(atlas) => {
            let laws: Vec<Value> = atlas
                .charts
                .iter()
                .map(|c| chart_laws(space, c, &mut outcome.violations))
                .collect();
            outcome.dot = Some(export_dot(space, Some(Annotation::Atlas(&atlas))));
            if cyclic {
                let circularity = circular_order(&atlas);
                if let Circularity::NotCyclic { reason } = &circularity {
                    outcome.negative = true;
                    outcome.violations.push(format!("not cyclic: {reason}"));
                }
                outcome.payload = json!({ "atlas": atlas, "circularity": circularity, "laws": laws });
            } else {
                outcome.payload = json!({ "atlas": atlas, "laws": laws });
            }
        }
        Err(e) => outcome.violations.push(e.to_string()),
    }
    Ok(outcome)
}

fn run_verify(space: &Space, suite: Suite, seed: u64, samples: usize) -> Result<Outcome, CommandError> {
    let mut outcome = Outcome::new(space, Value::Null);
    let checks = run_suite(space, suite, Sampling { seed, samples });
    for check in &checks {
        outcome
            .violations
            .extend(check.violations.iter().map(|v| format!("{}: {v}", check.check)));
    }
    outcome.payload = json!({ "suite": suite, "seed": seed, "samples": samples, "checks": checks });
    Ok(outcome)
}

fn run_betweenness(file: &Path) -> Result<Outcome, CommandError> {
    let relation = read_betweenness(file)?;
    match from_betweenness(&relation) {
        Ok((space, chart)) => {
            let mut outcome = Outcome::new(&space, Value::Null);
            outcome.payload =
                json!({ "realizable": true, "order": chart.order(), "space": SpaceFile::from_space(&space) });
            Ok(outcome)
        }
        Err(GenError::NotBetweennessRealizable(reason)) => Ok(Outcome {
            summary: None,
            payload: json!({ "realizable": false, "reason": reason }),
            violations: vec![format!("not realizable: {reason}")],
            negative: true,
            dot: None,
        }),
        Err(e) => Err(InputError::Relation(e).into()),
    }
}

fn parse_list(flag: &str, text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("invalid --{flag} {text:?}"))
}

fn generate(cli: &Cli) -> Result<(Space, Value), String> {
    let Command::Gen {
        kind,
        n,
        arms,
        len,
        lengths,
        window,
        radii,
        seed,
    } = &cli.command
    else {
        unreachable!("only called for gen");
    };
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| format!("gen {kind:?} requires --{flag}").to_lowercase());
    let radii = parse_list("radii", radii)?;
    let shape = match kind {
        GenKind::Path => Shape::Path { n: need(*n, "n")? },
        GenKind::Cycle => Shape::Cycle { n: need(*n, "n")? },
        GenKind::Star => Shape::Star {
            arms: need(*arms, "arms")?,
            len: need(*len, "len")?,
        },
        GenKind::Theta => {
            let list = parse_list("lengths", lengths.as_deref().ok_or("gen theta requires --lengths")?)?;
            let lengths: [usize; 3] = list
                .try_into()
                .map_err(|_| "--lengths takes three values".to_string())?;
            Shape::Theta { lengths }
        }
        GenKind::RandomTree => Shape::RandomTree {
            n: need(*n, "n")?,
            seed: *seed,
        },
        GenKind::ShortIntervals => {
            let n = need(*n, "n")?;
            let window = need(*window, "window")?;
            let space = restricted_interval_structure(n, window).map_err(|e| e.to_string())?;
            return Ok((space, json!({ "kind": "short_intervals", "n": n, "window": window })));
        }
    };
    let space = gen_standard(&shape, &radii).map_err(|e| e.to_string())?;
    Ok((space, json!({ "shape": shape, "radii": radii })))
}

fn run_gen(cli: &Cli, echo: Vec<String>) -> Execution {
    let (space, recipe) = match generate(cli) {
        Ok(x) => x,
        Err(e) => return Execution::usage(format!("linetop: {e}")),
    };
    let file = SpaceFile::from_space(&space).to_json();
    let mut files = Vec::new();
    if let Some(path) = &cli.dot {
        files.push((path.clone(), export_dot(&space, None)));
    }
    let Some(out) = &cli.out else {
        return Execution {
            report: None,
            stdout: file,
            stderr: String::new(),
            files,
            exit_status: EXIT_OK,
        };
    };
    files.push((out.clone(), file));
    let report = Report {
        command: echo,
        summary: Some(Summary::of(&space)),
        payload: json!({ "generated": recipe, "file": out.to_string_lossy() }),
        violations: Vec::new(),
        exit_status: EXIT_OK,
    };
    Execution {
        stdout: report.to_json(),
        report: Some(report),
        stderr: String::new(),
        files,
        exit_status: EXIT_OK,
    }
}
