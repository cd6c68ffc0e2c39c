//! Solver-run assembly: spec-level validation, the independent oracle-call
//! counter, solver dispatch, and the run report the front end writes out.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use quasar_opt::{
    solve_gd, solve_nonstrong_qc, solve_strongly_qc, solve_via_regularization, Objective, Problem,
    SolveOptions, SolverTrace, Termination,
};

use crate::instance::{self, BuiltInstance, InstanceSpec, SpecError, DESK_MAX_EVALS};
use crate::rows::{self, TraceDocument, TraceRow};

/// Solver selection, matching the command-line names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SolverKind {
    /// Accelerated solver for strong curvature (needs mu > 0).
    AgdStrong,
    /// Accelerated solver for the plain quasar-convex case.
    AgdNonstrong,
    /// Plain 1/L-step gradient descent.
    Gd,
    /// Regularization reduction: strong solver on a quadratically pulled
    /// surrogate.
    Regularized,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::AgdStrong => "agd-strong",
            SolverKind::AgdNonstrong => "agd-nonstrong",
            SolverKind::Gd => "gd",
            SolverKind::Regularized => "regularized",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A validated solve request.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub instance: InstanceSpec,
    pub solver: SolverKind,
    /// Target accuracy; required when no iteration budget is given, and
    /// always required by the solvers that size internal slack from it.
    pub epsilon: Option<f64>,
    /// Explicit iteration budget; `None` derives the certified budget.
    pub max_iters: Option<u64>,
    /// Replaces the instance's declared search radius.
    pub radius_override: Option<f64>,
    /// Seeds the start point (quadratic instances; chains start at 0).
    pub seed: u64,
}

impl RunSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        instance::validate_spec(&self.instance)?;
        if let Some(eps) = self.epsilon {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(SpecError::new(
                    "eps",
                    format!("target accuracy must be positive and finite, got {eps}"),
                ));
            }
        }
        if self.epsilon.is_none() && self.max_iters.is_none() {
            return Err(SpecError::new(
                "eps",
                "a positive target accuracy is required when no iteration budget (--iters) is given",
            ));
        }
        if let Some(r) = self.radius_override {
            if !(r.is_finite() && r > 0.0) {
                return Err(SpecError::new(
                    "R",
                    format!("search radius must be positive and finite, got {r}"),
                ));
            }
        }
        match self.solver {
            SolverKind::AgdNonstrong if self.epsilon.is_none() => Err(SpecError::new(
                "eps",
                "agd-nonstrong sizes its line-search slack from the target accuracy; \
                 supply --eps even when --iters is given",
            )),
            SolverKind::Regularized if self.epsilon.is_none() => Err(SpecError::new(
                "eps",
                "regularized sizes its quadratic pull from the target accuracy; \
                 supply --eps even when --iters is given",
            )),
            SolverKind::AgdStrong
                if !matches!(self.instance, InstanceSpec::Quadratic { .. }) =>
            {
                Err(SpecError::new(
                    "solver",
                    format!(
                        "agd-strong needs strong curvature (mu > 0), but {} instances have mu = 0; \
                         use agd-nonstrong, regularized, or gd",
                        self.instance.kind_name()
                    ),
                ))
            }
            _ => Ok(()),
        }
    }
}

/// Front-end failure taxonomy; every variant exits with code 1.
#[derive(Debug)]
pub enum CliError {
    Spec(SpecError),
    Solver(quasar_opt::Error),
    Io { context: String, source: std::io::Error },
    /// The solver's reported totals disagree with the independent counter —
    /// an internal accounting bug, never expected.
    Accounting { which: &'static str, trace: u64, counter: u64 },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Spec(e) => write!(f, "{e}"),
            CliError::Solver(e) => write!(f, "solver error: {e}"),
            CliError::Io { context, source } => write!(f, "{context}: {source}"),
            CliError::Accounting { which, trace, counter } => write!(
                f,
                "oracle accounting mismatch: trace reports {trace} {which} but the instance \
                 counted {counter}"
            ),
        }
    }
}

impl std::error::Error for CliError {}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        CliError::Spec(e)
    }
}

impl From<quasar_opt::Error> for CliError {
    fn from(e: quasar_opt::Error) -> Self {
        CliError::Solver(e)
    }
}

/// Objective wrapper counting every combined value-and-gradient call on
/// shared atomic counters, independently of the solver's own accounting.
/// One combined call bumps both counters by one, mirroring the counted
/// oracle the solvers use internally.
pub struct CountedObjective {
    inner: Box<dyn Objective>,
    fn_evals: Arc<AtomicU64>,
    grad_evals: Arc<AtomicU64>,
}

impl CountedObjective {
    pub fn new(inner: Box<dyn Objective>) -> (Self, Arc<AtomicU64>, Arc<AtomicU64>) {
        let fn_evals = Arc::new(AtomicU64::new(0));
        let grad_evals = Arc::new(AtomicU64::new(0));
        (
            Self {
                inner,
                fn_evals: Arc::clone(&fn_evals),
                grad_evals: Arc::clone(&grad_evals),
            },
            fn_evals,
            grad_evals,
        )
    }
}

impl Objective for CountedObjective {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.fn_evals.fetch_add(1, Ordering::Relaxed);
        self.grad_evals.fetch_add(1, Ordering::Relaxed);
        self.inner.value_grad(x, grad)
    }
}

/// Completed run, ready for serialization.
pub struct RunReport {
    pub trace: SolverTrace,
    pub rows: Vec<TraceRow>,
    pub document: TraceDocument,
    pub exit_code: i32,
    pub summary: String,
}

/// The curvature modulus each solver runs under: the accelerated strong
/// solver and the baseline use the instance's own modulus; the non-strong
/// paths are defined for mu = 0 and treat every instance that way.
fn mu_for(solver: SolverKind, built: &BuiltInstance) -> f64 {
    match solver {
        SolverKind::AgdStrong | SolverKind::Gd => built.natural_mu,
        SolverKind::AgdNonstrong | SolverKind::Regularized => 0.0,
    }
}

fn format_opt(value: Option<f64>) -> String {
    value.map_or_else(|| "unknown".to_string(), |v| format!("{v:e}"))
}

/// Validates the spec, builds the instance, runs the solver with the desk
/// evaluation cap, checks the accounting invariant, and assembles the
/// report. Guard-tripped runs are reported (exit code 2), not errors.
pub fn execute(spec: &RunSpec) -> Result<RunReport, CliError> {
    spec.validate()?;
    let built = instance::build(&spec.instance, spec.seed, spec.radius_override)?;
    let instance_label = spec.instance.describe();
    let dim = built.objective.dim();

    let mu = mu_for(spec.solver, &built);
    let (counted, fn_counter, grad_counter) = CountedObjective::new(built.objective);
    let problem = Problem::new(counted, built.l_smooth, built.gamma, mu)?
        .with_radius(built.radius)?
        .with_optimum(built.optimum_point.clone(), built.optimum_value)?;

    let options = SolveOptions {
        max_iters: spec.max_iters,
        target_accuracy: spec.epsilon,
        max_oracle_evals: Some(DESK_MAX_EVALS),
        ..SolveOptions::default()
    };

    let trace = match spec.solver {
        SolverKind::AgdStrong => solve_strongly_qc(&problem, &built.x0, &options)?,
        SolverKind::AgdNonstrong => solve_nonstrong_qc(&problem, &built.x0, &options)?,
        SolverKind::Gd => solve_gd(&problem, &built.x0, &options)?,
        SolverKind::Regularized => solve_via_regularization(&problem, &built.x0, &options)?,
    };

    let counted_fn = fn_counter.load(Ordering::Relaxed);
    let counted_grad = grad_counter.load(Ordering::Relaxed);
    if trace.total_fn_evals != counted_fn {
        return Err(CliError::Accounting {
            which: "value evaluations",
            trace: trace.total_fn_evals,
            counter: counted_fn,
        });
    }
    if trace.total_grad_evals != counted_grad {
        return Err(CliError::Accounting {
            which: "gradient evaluations",
            trace: trace.total_grad_evals,
            counter: counted_grad,
        });
    }

    let rows = rows::rows_from_trace(&trace);
    let document = rows::document_from_trace(spec.solver.as_str(), &instance_label, &trace);
    let exit_code = rows::exit_code_for(trace.termination);

    let mut summary = String::new();
    summary.push_str(&format!("solver = {}\n", spec.solver.as_str()));
    summary.push_str(&format!("instance = {instance_label}\n"));
    summary.push_str(&format!("dim = {dim}\n"));
    summary.push_str(&format!("termination = {}\n", trace.termination.as_str()));
    summary.push_str(&format!("iterations = {}\n", trace.iterations));
    summary.push_str(&format!("initial_gap = {}\n", format_opt(trace.initial_gap)));
    summary.push_str(&format!("final_gap = {}\n", format_opt(trace.final_gap)));
    summary.push_str(&format!("fn_evals = {}\n", trace.total_fn_evals));
    summary.push_str(&format!("grad_evals = {}\n", trace.total_grad_evals));
    if let Some(k) = trace.quasar_violation_at {
        summary.push_str(&format!(
            "warning = declared quasar inequality violated at iteration {k}\n"
        ));
    }

    Ok(RunReport {
        trace,
        rows,
        document,
        exit_code,
        summary,
    })
}

/// True when the run ended for one of the two regular reasons.
pub fn is_regular(termination: Termination) -> bool {
    !matches!(termination, Termination::GuardTripped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::SpectrumKind;

    fn quadratic_spec() -> InstanceSpec {
        InstanceSpec::Quadratic {
            n: 8,
            mu: 0.01,
            l: 1.0,
            spectrum: SpectrumKind::Log,
            xstar_seed: 3,
        }
    }

    #[test]
    fn validation_names_missing_epsilon() {
        let spec = RunSpec {
            instance: quadratic_spec(),
            solver: SolverKind::AgdStrong,
            epsilon: None,
            max_iters: None,
            radius_override: None,
            seed: 0,
        };
        let err = spec.validate().unwrap_err();
        assert_eq!(err.field, "eps");
    }

    #[test]
    fn nonstrong_requires_epsilon_even_with_budget() {
        let spec = RunSpec {
            instance: quadratic_spec(),
            solver: SolverKind::AgdNonstrong,
            epsilon: None,
            max_iters: Some(50),
            radius_override: None,
            seed: 0,
        };
        let err = spec.validate().unwrap_err();
        assert_eq!(err.field, "eps");
        assert!(err.message.contains("slack"));
    }

    #[test]
    fn strong_solver_rejected_on_flat_instances() {
        let spec = RunSpec {
            instance: InstanceSpec::HardUnscaled { t: 1000, sigma: 1e-6 },
            solver: SolverKind::AgdStrong,
            epsilon: Some(1e-3),
            max_iters: None,
            radius_override: None,
            seed: 0,
        };
        let err = spec.validate().unwrap_err();
        assert_eq!(err.field, "solver");
        assert!(err.message.contains("agd-strong"));
    }

    #[test]
    fn execute_reaches_target_and_accounts_every_call() {
        let spec = RunSpec {
            instance: quadratic_spec(),
            solver: SolverKind::AgdStrong,
            epsilon: Some(1e-8),
            max_iters: None,
            radius_override: Some(5.0),
            seed: 17,
        };
        let report = execute(&spec).unwrap();
        assert_eq!(report.exit_code, 0);
        assert_eq!(report.trace.termination, Termination::TargetReached);
        let last = report.rows.last().unwrap();
        assert_eq!(last.cum_grad_evals, report.trace.total_grad_evals);
        assert_eq!(last.cum_fn_evals, report.trace.total_fn_evals);
        assert!(last.f_gap.unwrap() <= 1e-8);
        assert_eq!(report.rows.len() as u64, report.trace.iterations + 1);
        assert!(report.summary.contains("termination = target-reached"));
    }

    #[test]
    fn execute_is_deterministic() {
        let spec = RunSpec {
            instance: quadratic_spec(),
            solver: SolverKind::Gd,
            epsilon: Some(1e-4),
            max_iters: Some(400),
            radius_override: Some(2.0),
            seed: 9,
        };
        let a = execute(&spec).unwrap();
        let b = execute(&spec).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.summary, b.summary);
    }

    #[test]
    fn gd_rows_leave_step_columns_blank() {
        let spec = RunSpec {
            instance: quadratic_spec(),
            solver: SolverKind::Gd,
            epsilon: Some(1e-3),
            max_iters: Some(50),
            radius_override: None,
            seed: 2,
        };
        let report = execute(&spec).unwrap();
        let first = &report.rows[0];
        assert_eq!(first.alpha_k, None);
        assert_eq!(first.eta_k, None);
        assert_eq!(first.linesearch_evals, Some(0));
        assert!(first.grad_norm_at_y.is_some());
    }
}
