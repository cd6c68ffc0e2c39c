//! Scaling studies over the scaled worst-case chain family: iteration cost
//! against the accuracy target and against the curve parameter, for the
//! accelerated non-strong solver and the gradient-descent baseline.
//!
//! Each study sweeps one variable over a fixed grid (four points by
//! default), runs its solver to the target accuracy on the corresponding
//! instance, and reports an ordinary-least-squares slope of
//! log10(iterations) against log10(swept value). Runs store no
//! per-iteration trajectory — only totals matter here — and grid points are
//! executed and emitted in grid order, so output is deterministic.

use std::io::{self, Write};

use serde::Serialize;

use quasar_opt::{solve_gd, solve_nonstrong_qc, Problem, SolveOptions};

use crate::instance::{self, InstanceSpec, SpecError, DESK_MAX_EVALS};
use crate::run::{CliError, SolverKind};

/// Which scaling study to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StudyKind {
    /// Accelerated non-strong solver, iteration count vs target accuracy.
    AgdVsEps,
    /// Accelerated non-strong solver, iteration count vs curve parameter.
    AgdVsGamma,
    /// Gradient descent, iteration count vs target accuracy.
    GdVsEps,
}

impl StudyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StudyKind::AgdVsEps => "agd-vs-eps",
            StudyKind::AgdVsGamma => "agd-vs-gamma",
            StudyKind::GdVsEps => "gd-vs-eps",
        }
    }

    pub fn solver(self) -> SolverKind {
        match self {
            StudyKind::AgdVsEps | StudyKind::AgdVsGamma => SolverKind::AgdNonstrong,
            StudyKind::GdVsEps => SolverKind::Gd,
        }
    }

    /// Name of the swept variable.
    pub fn swept(self) -> &'static str {
        match self {
            StudyKind::AgdVsEps | StudyKind::GdVsEps => "eps",
            StudyKind::AgdVsGamma => "gamma",
        }
    }

    pub const ALL: [StudyKind; 3] = [StudyKind::AgdVsEps, StudyKind::AgdVsGamma, StudyKind::GdVsEps];
}

/// Grid overrides; `None` keeps the study's frozen defaults.
#[derive(Debug, Clone, Default)]
pub struct BenchOverrides {
    /// Swept values replacing the default grid (at least four).
    pub points: Option<Vec<f64>>,
    /// Fixed curve parameter for the accuracy sweeps.
    pub gamma: Option<f64>,
    /// Fixed target accuracy for the curve-parameter sweep.
    pub eps: Option<f64>,
    /// Optimum distance of every instance in the study.
    pub radius: Option<f64>,
}

/// Fully resolved study grid.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub kind: StudyKind,
    pub l_smooth: f64,
    pub radius: f64,
    /// Fixed curve parameter (accuracy sweeps) — ignored for the gamma sweep.
    pub gamma: f64,
    /// Fixed accuracy (gamma sweep) — ignored for the accuracy sweeps.
    pub eps: f64,
    pub swept_values: Vec<f64>,
}

/// Default grids. Chosen so every instance sits inside the certified range
/// of the scaled chain family, derived chain lengths stay within desk caps,
/// and the full three-study sweep finishes comfortably inside desk runtime.
pub fn default_config(kind: StudyKind) -> StudyConfig {
    match kind {
        StudyKind::AgdVsEps => StudyConfig {
            kind,
            l_smooth: 1.0,
            radius: 100.0,
            gamma: 1e-2,
            eps: f64::NAN,
            swept_values: vec![1e-2, 2.5e-3, 6.25e-4, 1.5625e-4],
        },
        StudyKind::AgdVsGamma => StudyConfig {
            kind,
            l_smooth: 1.0,
            radius: 1.0,
            gamma: f64::NAN,
            eps: 1e-6,
            swept_values: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3],
        },
        StudyKind::GdVsEps => StudyConfig {
            kind,
            l_smooth: 1.0,
            radius: 2.0,
            gamma: 1e-2,
            eps: f64::NAN,
            swept_values: vec![4e-6, 2.5e-6, 1.6e-6, 1e-6],
        },
    }
}

/// Applies overrides and validates the grid.
pub fn resolve_config(kind: StudyKind, overrides: &BenchOverrides) -> Result<StudyConfig, SpecError> {
    let mut config = default_config(kind);
    if let Some(r) = overrides.radius {
        if !(r.is_finite() && r > 0.0) {
            return Err(SpecError::new("R", format!("must be positive and finite, got {r}")));
        }
        config.radius = r;
    }
    match kind {
        StudyKind::AgdVsEps | StudyKind::GdVsEps => {
            if overrides.eps.is_some() {
                return Err(SpecError::new(
                    "eps",
                    format!("{} sweeps eps; pass the grid via --points instead", kind.as_str()),
                ));
            }
            if let Some(g) = overrides.gamma {
                if !(g.is_finite() && g > 0.0 && g <= 1e-2) {
                    return Err(SpecError::new(
                        "gamma",
                        format!("must lie in (0, 1e-2] (certified range), got {g}"),
                    ));
                }
                config.gamma = g;
            }
        }
        StudyKind::AgdVsGamma => {
            if overrides.gamma.is_some() {
                return Err(SpecError::new(
                    "gamma",
                    "agd-vs-gamma sweeps gamma; pass the grid via --points instead",
                ));
            }
            if let Some(e) = overrides.eps {
                if !(e.is_finite() && e > 0.0) {
                    return Err(SpecError::new("eps", format!("must be positive and finite, got {e}")));
                }
                config.eps = e;
            }
        }
    }
    if let Some(points) = &overrides.points {
        config.swept_values = points.clone();
    }
    if config.swept_values.len() < 4 {
        return Err(SpecError::new(
            "points",
            format!(
                "least-squares slopes need at least 4 grid points, got {}",
                config.swept_values.len()
            ),
        ));
    }
    for &value in &config.swept_values {
        if !(value.is_finite() && value > 0.0) {
            return Err(SpecError::new(
                "points",
                format!("swept values must be positive and finite, got {value}"),
            ));
        }
        if kind.swept() == "gamma" && value > 1e-2 {
            return Err(SpecError::new(
                "points",
                format!("curve parameters must not exceed 1e-2 (certified range), got {value}"),
            ));
        }
    }
    Ok(config)
}

/// One grid point's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub study: String,
    pub solver: String,
    pub l_smooth: f64,
    pub radius: f64,
    pub gamma: f64,
    pub eps: f64,
    pub chain_len: usize,
    pub iterations: u64,
    pub fn_evals: u64,
    pub grad_evals: u64,
    pub termination: String,
}

/// One completed study: its rows in grid order plus the fitted slope.
#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub study: String,
    pub solver: String,
    pub swept_variable: String,
    pub slope: f64,
    pub rows: Vec<BenchRow>,
}

/// Document wrapping one or more studies for JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct BenchDocument {
    pub studies: Vec<StudyReport>,
}

/// Ordinary-least-squares slope of y against x.
pub fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut covariance = 0.0;
    let mut variance = 0.0;
    for (x, y) in points {
        covariance += (x - mean_x) * (y - mean_y);
        variance += (x - mean_x) * (x - mean_x);
    }
    covariance / variance
}

fn run_point(kind: StudyKind, config: &StudyConfig, swept: f64) -> Result<BenchRow, CliError> {
    let (gamma, eps) = match kind.swept() {
        "eps" => (config.gamma, swept),
        _ => (swept, config.eps),
    };
    let spec = InstanceSpec::HardScaled {
        l: config.l_smooth,
        r: config.radius,
        gamma,
        eps,
    };
    // Re-attribute instance-level failures to the grid: the swept values
    // are what drove the instance out of range.
    let built = instance::build(&spec, 0, None)
        .map_err(|e| SpecError::new("points", format!("grid point {swept}: {}", e.message)))?;
    let chain_len = built.chain_len.unwrap_or(0);
    let problem = Problem::new(built.objective, built.l_smooth, built.gamma, 0.0)
        .map_err(CliError::Solver)?
        .with_radius(built.radius)
        .map_err(CliError::Solver)?
        .with_optimum(built.optimum_point, built.optimum_value)
        .map_err(CliError::Solver)?;
    let options = SolveOptions {
        target_accuracy: Some(eps),
        record_trajectory: false,
        max_oracle_evals: Some(DESK_MAX_EVALS),
        ..SolveOptions::default()
    };
    let trace = match kind.solver() {
        SolverKind::AgdNonstrong => solve_nonstrong_qc(&problem, &built.x0, &options),
        SolverKind::Gd => solve_gd(&problem, &built.x0, &options),
        other => unreachable!("studies only use agd-nonstrong and gd, got {other}"),
    }
    .map_err(CliError::Solver)?;
    Ok(BenchRow {
        study: kind.as_str().to_string(),
        solver: kind.solver().as_str().to_string(),
        l_smooth: config.l_smooth,
        radius: config.radius,
        gamma,
        eps,
        chain_len,
        iterations: trace.iterations,
        fn_evals: trace.total_fn_evals,
        grad_evals: trace.total_grad_evals,
        termination: trace.termination.as_str().to_string(),
    })
}

/// Runs one study over its grid, in grid order.
pub fn run_study(kind: StudyKind, overrides: &BenchOverrides) -> Result<StudyReport, CliError> {
    let config = resolve_config(kind, overrides)?;
    let mut rows = Vec::with_capacity(config.swept_values.len());
    for &swept in &config.swept_values {
        rows.push(run_point(kind, &config, swept)?);
    }
    let fit: Vec<(f64, f64)> = rows
        .iter()
        .zip(&config.swept_values)
        .map(|(row, swept)| (swept.log10(), (row.iterations as f64).log10()))
        .collect();
    Ok(StudyReport {
        study: kind.as_str().to_string(),
        solver: kind.solver().as_str().to_string(),
        swept_variable: kind.swept().to_string(),
        slope: ols_slope(&fit),
        rows,
    })
}

pub const BENCH_HEADER: &str =
    "study,solver,l_smooth,radius,gamma,eps,chain_len,iterations,fn_evals,grad_evals,termination";

/// CSV table: one header, all rows in study/grid order, then one comment
/// line per study carrying its fitted slope.
pub fn write_bench_csv<W: Write + ?Sized>(writer: &mut W, reports: &[StudyReport]) -> io::Result<()> {
    writeln!(writer, "{BENCH_HEADER}")?;
    for report in reports {
        for row in &report.rows {
            writeln!(
                writer,
                "{},{},{},{},{},{},{},{},{},{},{}",
                row.study,
                row.solver,
                row.l_smooth,
                row.radius,
                row.gamma,
                row.eps,
                row.chain_len,
                row.iterations,
                row.fn_evals,
                row.grad_evals,
                row.termination
            )?;
        }
    }
    for report in reports {
        writeln!(
            writer,
            "# slope {}: log10(iterations) vs log10({}) = {}",
            report.study, report.swept_variable, report.slope
        )?;
    }
    Ok(())
}

pub fn write_bench_json<W: Write + ?Sized>(writer: &mut W, reports: &[StudyReport]) -> io::Result<()> {
    let document = BenchDocument {
        studies: reports.to_vec(),
    };
    serde_json::to_writer(&mut *writer, &document)?;
    writeln!(writer)
}

/// One-line-per-study slope summary for the console.
pub fn slope_summary(reports: &[StudyReport]) -> String {
    let mut text = String::new();
    for report in reports {
        text.push_str(&format!(
            "{}: slope of log10(iterations) vs log10({}) = {:.4} over {} grid points\n",
            report.study,
            report.swept_variable,
            report.slope,
            report.rows.len()
        ));
    }
    text
}
