//! Command-line surface. Exit codes: 0 success, 1 violations or failed
//! computations, 2 usage and configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{bound_theorem, EstimationConfig};
use crate::config::{ArcEntry, FunctionEntry, ScenarioConfig};
use crate::divided_difference::{dd_lagrange, dd_recursive, NodeSet};
use crate::error::{Error, Result};
use crate::harness::{run_verification_suite, sweep_from_report};
use crate::interpolation::{newton_build, InterpolantRecord, NodeOrdering};
use crate::selftest::run_selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "arcinterp", version, about = "Divided differences and interpolation bounds on Jordan arcs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Divided difference of a function at nodes on an arc.
    Dd(DdArgs),
    /// Newton interpolant evaluated at points on the arc.
    Interp(InterpArgs),
    /// Bound certificate for one node set.
    Bound(BoundArgs),
    /// Batch verification of the bounds from a scenario file.
    Verify(RunArgs),
    /// Ratio statistics per (arc, function, n) from a scenario file.
    Sweep(RunArgs),
    /// Invariant suites at reduced scale.
    Selftest,
}

#[derive(Debug, Args)]
struct Target {
    /// Arc name (segment, circle, half-circle, ellipse-arc) or inline JSON.
    #[arg(long)]
    arc: String,
    /// Function name (exp, sin, conj, abs2, z3+conj, one, z, z2, z3) or inline JSON.
    #[arg(long = "fn")]
    function: String,
    /// Node parameters in [0, 1], comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "nodes_roots_of_unity")]
    nodes: Vec<f64>,
    /// Use the N parameters k/N; on the unit circle these are the N-th roots of unity.
    #[arg(long, value_name = "N")]
    nodes_roots_of_unity: Option<usize>,
}

impl Target {
    fn resolve(&self) -> Result<(crate::arc::JordanArc, crate::function::ArcFunction, NodeSet)> {
        let arc = ArcEntry::parse(&self.arc)?.build()?;
        let f = FunctionEntry::parse(&self.function)?.spec()?.on_arc(&arc);
        let params = match self.nodes_roots_of_unity {
            Some(0) => return Err(Error::InvalidArgument("need at least one node".into())),
            Some(m) => (0..m).map(|k| k as f64 / m as f64).collect(),
            None if self.nodes.is_empty() => {
                return Err(Error::InvalidArgument(
                    "give --nodes or --nodes-roots-of-unity".into(),
                ))
            }
            None => self.nodes.clone(),
        };
        let nodes = NodeSet::new(&arc, params)?;
        Ok((arc, f, nodes))
    }
}

#[derive(Debug, Args)]
struct DdArgs {
    #[command(flatten)]
    target: Target,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Ordering {
    AsGiven,
    Leja,
    Auto,
}

#[derive(Debug, Args)]
struct InterpArgs {
    #[command(flatten)]
    target: Target,
    /// Evaluation parameters in [0, 1], comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    at: Vec<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    ordering: Ordering,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[command(flatten)]
    target: Target,
    /// Cells per unit parameter for the constant grids.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    diameter_grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn pair(z: num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct DdOutput {
    arc: String,
    function: String,
    n: usize,
    params: Vec<f64>,
    lagrange: [f64; 2],
    recursive: [f64; 2],
    abs: f64,
    abs_term_sum: f64,
    conditioning_warning: Option<String>,
}

#[derive(Serialize)]
struct Evaluation {
    t: f64,
    z: [f64; 2],
    p: [f64; 2],
    f: [f64; 2],
    error: f64,
}

#[derive(Serialize)]
struct InterpOutput {
    interpolant: InterpolantRecord,
    evaluations: Vec<Evaluation>,
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::InvalidArgument(_) | Error::Io(_) | Error::DegenerateArc(_) => EXIT_USAGE,
        _ => EXIT_VIOLATIONS,
    }
}

fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Dd(args) => {
            let (arc, f, nodes) = args.target.resolve()?;
            let lag = dd_lagrange(&f, &nodes)?;
            let rec = dd_recursive(&f, &nodes)?.top();
            emit(
                &json(&DdOutput {
                    arc: arc.label().into(),
                    function: f.label().into(),
                    n: nodes.order(),
                    params: nodes.params().to_vec(),
                    lagrange: pair(lag.value),
                    recursive: pair(rec),
                    abs: lag.value.norm(),
                    abs_term_sum: lag.abs_term_sum,
                    conditioning_warning: lag.conditioning_warning,
                }),
                None,
            )?;
            Ok(EXIT_OK)
        }
        Command::Interp(args) => {
            let (arc, f, nodes) = args.target.resolve()?;
            let ordering = match args.ordering {
                Ordering::AsGiven => NodeOrdering::AsGiven,
                Ordering::Leja => NodeOrdering::Leja,
                Ordering::Auto => NodeOrdering::Auto,
            };
            let p = newton_build(&f, &nodes, ordering)?;
            let mut evaluations = Vec::with_capacity(args.at.len());
            for &t in &args.at {
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::InvalidArgument(format!("evaluation parameter {t} outside [0, 1]")));
                }
                let z = arc.point(t);
                let pz = p.eval(z);
                let fz = f.value(t)?;
                evaluations.push(Evaluation {
                    t,
                    z: pair(z),
                    p: pair(pz),
                    f: pair(fz),
                    error: (fz - pz).norm(),
                });
            }
            emit(
                &json(&InterpOutput {
                    interpolant: p.record(),
                    evaluations,
                }),
                None,
            )?;
            Ok(EXIT_OK)
        }
        Command::Bound(args) => {
            let (arc, f, nodes) = args.target.resolve()?;
            let mut cfg = EstimationConfig::default();
            if let Some(g) = args.grid {
                cfg.constant_grid = g;
            }
            if let Some(g) = args.diameter_grid {
                cfg.diameter_grid = g;
            }
            let cert = bound_theorem(&f, &arc, &nodes, &cfg)?;
            emit(&json(&cert), None)?;
            Ok(if cert.holds { EXIT_OK } else { EXIT_VIOLATIONS })
        }
        Command::Verify(args) => {
            let report = run_verification_suite(&load(&args)?)?;
            let text = match args.format.unwrap_or(Format::Json) {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            emit(&text, args.out.as_ref())?;
            let s = &report.summary;
            eprintln!(
                "{} rows, {} violations ({} before safety factor), {} failures, max ratio {:.6e}",
                s.trials, s.violations, s.raw_violations, s.failures, s.max_ratio
            );
            Ok(if report.is_clean() { EXIT_OK } else { EXIT_VIOLATIONS })
        }
        Command::Sweep(args) => {
            let report = run_verification_suite(&load(&args)?)?;
            let sweep = sweep_from_report(&report);
            let text = match args.format.unwrap_or(Format::Csv) {
                Format::Json => sweep.to_json(),
                Format::Csv => sweep.to_csv(),
            };
            emit(&text, args.out.as_ref())?;
            Ok(if report.is_clean() { EXIT_OK } else { EXIT_VIOLATIONS })
        }
        Command::Selftest => {
            let outcomes = run_selftest();
            let mut text = String::new();
            for c in &outcomes {
                text.push_str(&format!(
                    "{} {}: {}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            emit(&text, None)?;
            Ok(if outcomes.iter().all(|c| c.pass) { EXIT_OK } else { EXIT_VIOLATIONS })
        }
    }
}

fn load(args: &RunArgs) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Parses `argv` (program name first) and runs the command.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
