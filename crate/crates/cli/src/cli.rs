//! Argument parsing and command dispatch.
//!
//! Exit codes: 0 for a completed run (including iteration-budget stops),
//! 1 for any malformed spec, argument, or I/O failure, 2 when a solver run
//! ends with a tripped guard (the trace is still written).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchOverrides, StudyKind};
use crate::instance;
use crate::probe::{self, ProbeSpec};
use crate::rows;
use crate::run::{self, CliError, RunSpec, SolverKind};
use crate::verify_cmd::{self, VerifySpec};

/// Output encoding for trace and table files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "quasar",
    version,
    about = "Accelerated first-order methods for smooth quasar-convex minimization: \
             solver runs with exact oracle accounting, scaling studies, line-search \
             probes, and certification reports",
    max_term_width = 100
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solver on one instance and write its trace.
    Solve(SolveArgs),
    /// Run scaling studies on the worst-case chain family and fit
    /// log-log slopes of iteration cost.
    BenchScaling(BenchArgs),
    /// Run the momentum line search once and report its certification.
    LinesearchProbe(ProbeArgs),
    /// Certify an instance's declared constants by seeded sampling.
    Verify(VerifyArgs),
    /// Parse, validate, and re-emit an instance spec as normalized JSON.
    InstanceDump(DumpArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance spec: a path to a JSON file, or inline JSON starting with '{'.
    #[arg(long, value_name = "PATH|JSON")]
    pub instance: String,
    /// Solver to run.
    #[arg(long, value_enum)]
    pub solver: SolverKind,
    /// Target accuracy; required unless --iters is given (and always
    /// required by agd-nonstrong and regularized).
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Explicit iteration budget (otherwise derived from --eps).
    #[arg(long)]
    pub iters: Option<u64>,
    /// Override the search radius (quadratic start distance; chain budget).
    #[arg(long = "R", allow_negative_numbers = true)]
    pub radius: Option<f64>,
    /// Start-point seed (quadratic instances; chains always start at 0).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trace destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trace encoding.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Studies to run; all three when omitted.
    #[arg(long, value_enum)]
    pub study: Option<StudyKind>,
    /// Swept grid values replacing the study's default grid (single study
    /// only; at least four values).
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<f64>>,
    /// Fixed curve parameter for the accuracy sweeps.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Fixed target accuracy for the curve-parameter sweep.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Optimum distance of every instance in the study.
    #[arg(long = "R", allow_negative_numbers = true)]
    pub radius: Option<f64>,
    /// Table destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Table encoding.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// Instance spec: a path to a JSON file, or inline JSON starting with '{'.
    #[arg(long, value_name = "PATH|JSON")]
    pub instance: String,
    /// Quadratic relaxation weight b >= 0.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    /// Value-difference weight c >= 0.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    /// Additive slack of the descent condition.
    #[arg(long = "eps-tilde", default_value_t = 0.0, allow_negative_numbers = true)]
    pub eps_tilde: f64,
    /// Seed for randomly drawn segment endpoints.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Explicit gradient-step endpoint, comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    /// Explicit momentum endpoint, comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v: Option<Vec<f64>>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report encoding: plain text or JSON.
    #[arg(long, value_enum, default_value_t = ProbeFormat::Text)]
    pub format: ProbeFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProbeFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Instance spec: a path to a JSON file, or inline JSON starting with '{'.
    #[arg(long, value_name = "PATH|JSON")]
    pub instance: String,
    /// Sampling seed recorded in the report.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Uniform sample count (chains add adversarial patterns on top).
    #[arg(long, default_value_t = 2_000)]
    pub samples: u64,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    /// Instance spec: a path to a JSON file, or inline JSON starting with '{'.
    #[arg(long, value_name = "PATH|JSON")]
    pub instance: String,
    /// Destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Writes through a closure either to a created file or to stdout.
fn write_output(
    out: Option<&Path>,
    emit: &mut dyn FnMut(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Io {
                context: format!("cannot create output file `{}`", path.display()),
                source,
            })?;
            let mut writer = BufWriter::new(file);
            emit(&mut writer).and_then(|()| writer.flush()).map_err(|source| CliError::Io {
                context: format!("cannot write output file `{}`", path.display()),
                source,
            })
        }
        None => {
            let stdout = io::stdout();
            let mut writer = stdout.lock();
            emit(&mut writer).map_err(|source| CliError::Io {
                context: "cannot write to stdout".to_string(),
                source,
            })
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<i32, CliError> {
    let spec = RunSpec {
        instance: instance::parse_instance_arg(&args.instance)?,
        solver: args.solver,
        epsilon: args.eps,
        max_iters: args.iters,
        radius_override: args.radius,
        seed: args.seed,
    };
    let report = run::execute(&spec)?;
    write_output(args.out.as_deref(), &mut |writer| match args.format {
        OutputFormat::Csv => rows::write_csv(writer, &report.rows),
        OutputFormat::Json => rows::write_json(writer, &report.document),
    })?;
    // Keep stdout machine-readable when the trace goes there: the summary
    // moves to stderr in that case.
    if args.out.is_some() {
        print!("{}", report.summary);
    } else {
        eprint!("{}", report.summary);
    }
    Ok(report.exit_code)
}

fn cmd_bench(args: &BenchArgs) -> Result<i32, CliError> {
    let overrides = BenchOverrides {
        points: args.points.clone(),
        gamma: args.gamma,
        eps: args.eps,
        radius: args.radius,
    };
    let kinds: Vec<StudyKind> = match args.study {
        Some(kind) => vec![kind],
        None => {
            let custom_grid = args.points.is_some()
                || args.gamma.is_some()
                || args.eps.is_some()
                || args.radius.is_some();
            if custom_grid {
                return Err(CliError::Spec(instance::SpecError::new(
                    "study",
                    "grid overrides apply to a single study; pick one with --study",
                )));
            }
            StudyKind::ALL.to_vec()
        }
    };
    let mut reports = Vec::with_capacity(kinds.len());
    for kind in kinds {
        reports.push(bench::run_study(kind, &overrides)?);
    }
    write_output(args.out.as_deref(), &mut |writer| match args.format {
        OutputFormat::Csv => bench::write_bench_csv(writer, &reports),
        OutputFormat::Json => bench::write_bench_json(writer, &reports),
    })?;
    let summary = bench::slope_summary(&reports);
    if args.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(0)
}

fn cmd_probe(args: &ProbeArgs) -> Result<i32, CliError> {
    let spec = ProbeSpec {
        instance: instance::parse_instance_arg(&args.instance)?,
        b: args.b,
        c: args.c,
        eps_tilde: args.eps_tilde,
        seed: args.seed,
        x: args.x.clone(),
        v: args.v.clone(),
    };
    let report = probe::execute(&spec)?;
    write_output(args.out.as_deref(), &mut |writer| match args.format {
        ProbeFormat::Text => write!(writer, "{}", report.render_text()),
        ProbeFormat::Json => {
            serde_json::to_writer(&mut *writer, &report)?;
            writeln!(writer)
        }
    })?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let spec = VerifySpec {
        instance: instance::parse_instance_arg(&args.instance)?,
        seed: args.seed,
        samples: args.samples,
    };
    let report = verify_cmd::execute(&spec)?;
    let text = verify_cmd::render_json(&report);
    write_output(args.out.as_deref(), &mut |writer| write!(writer, "{text}"))?;
    Ok(0)
}

fn cmd_dump(args: &DumpArgs) -> Result<i32, CliError> {
    let spec = instance::parse_instance_arg(&args.instance)?;
    let text = instance::dump_json(&spec);
    write_output(args.out.as_deref(), &mut |writer| write!(writer, "{text}"))?;
    Ok(0)
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::BenchScaling(args) => cmd_bench(args),
        Command::LinesearchProbe(args) => cmd_probe(args),
        Command::Verify(args) => cmd_verify(args),
        Command::InstanceDump(args) => cmd_dump(args),
    }
}

/// Parses arguments and runs the selected command, returning the process
/// exit code. Usage errors exit 1 (help and version requests exit 0).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(error) => {
            let code = if error.use_stderr() { 1 } else { 0 };
            let _ = error.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            1
        }
    }
}
