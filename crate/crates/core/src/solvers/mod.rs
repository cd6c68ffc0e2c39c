//! Accelerated momentum solvers, a gradient-descent baseline, and the
//! strong-curvature regularization reduction.
//!
//! The central piece is a general accelerated scheme over a gradient-step
//! iterate `x` and a momentum iterate `v`; iteration `k` performs
//!
//! ```text
//! α^k  from a bisection search over the segment [v^k, x^k]   (or α^k = 1)
//! y^k    = α^k x^k + (1 − α^k) v^k
//! x^k+1  = y^k − (1/L) ∇f(y^k)
//! v^k+1  = β v^k + (1 − β) y^k − η^k ∇f(y^k)
//! ```
//!
//! [`solve_strongly_qc`] instantiates the scheme for strong quasar-convexity
//! (μ > 0) with constant β = 1 − γ√(μ/L) and η = 1/√(μL);
//! [`solve_nonstrong_qc`] covers μ = 0 with β = 1 and the step-weight
//! sequence η^k = γ/(L·ω^k). [`solve_gd`] is the plain 1/L-step baseline,
//! and [`solve_via_regularization`] reduces the μ = 0 case to the strong
//! solver by adding a small quadratic pull toward the start point.
//!
//! All runs are deterministic and account for every oracle call; see
//! [`SolverTrace`](crate::trace::SolverTrace) for what gets recorded.

pub mod framework;
pub mod gd;
pub mod reg;

pub use framework::{
    agd_step, nonstrong_envelope_violations, run_framework, solve_nonstrong_qc, solve_strongly_qc,
    strong_contraction_violations, FrameworkConfig, SearchCoefficients, StepPlan,
};
pub use gd::solve_gd;
pub use reg::{solve_via_regularization, RegularizedObjective};

use crate::error::{Error, Result};

/// Caller-tunable knobs shared by every solver entry point.
///
/// The zero-value default runs nothing useful on its own: each solver
/// requires enough of `max_iters` / `target_accuracy` / the problem's
/// optimum, radius, or `eps0_bound` to pin down an iteration budget, and
/// reports a configuration error otherwise.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Iteration budget. `None` derives the certified budget from
    /// `target_accuracy` together with the problem's declared radius or an
    /// initial-gap bound.
    pub max_iters: Option<u64>,
    /// Target accuracy ε. With a known optimum the run stops as soon as
    /// f(x^k) − f* ≤ ε; the non-strong solver also needs ε to size its
    /// line-search slack γε/2.
    pub target_accuracy: Option<f64>,
    /// Upper bound on the initial gap f(x⁰) − f*, used by the strong-case
    /// budget formula when the optimum is unknown.
    pub eps0_bound: Option<f64>,
    /// Store a per-iteration [`crate::trace::IterateRecord`] in the trace.
    /// On by default; turn it off for runs where only the totals and the
    /// final state matter (e.g. scaling studies over millions of
    /// iterations), at the cost of the per-iteration certification checks
    /// that read the records.
    pub record_trajectory: bool,
    /// Keep full x/v/y snapshots in every record (memory-heavy on long
    /// high-dimensional runs). Requires `record_trajectory`.
    pub keep_iterates: bool,
    /// With a known optimum, test the declared quasar-convexity inequality
    /// at every gradient-evaluation point and flag the first violation in
    /// the trace. On by default; it costs one dot product per iteration.
    pub check_quasar: bool,
    /// Hard cap on combined value-and-gradient oracle calls, checked between
    /// iterations (a run never stops mid-step, so the cap may be exceeded by
    /// one iteration's worth of calls).
    pub max_oracle_evals: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: None,
            target_accuracy: None,
            eps0_bound: None,
            record_trajectory: true,
            keep_iterates: false,
            check_quasar: true,
            max_oracle_evals: None,
        }
    }
}

impl SolveOptions {
    pub(crate) fn validate(&self) -> Result<()> {
        if let Some(eps) = self.target_accuracy {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "target accuracy must be finite and positive, got {eps}"
                )));
            }
        }
        if let Some(bound) = self.eps0_bound {
            if !(bound.is_finite() && bound >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "initial-gap bound must be finite and non-negative, got {bound}"
                )));
            }
        }
        if self.keep_iterates && !self.record_trajectory {
            return Err(Error::InvalidConfig(
                "keep_iterates stores snapshots inside iteration records; \
                 enable record_trajectory as well"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// `max(ln x, 1)`, the clipped logarithm used by the certified iteration
/// budgets. Non-positive (or NaN) arguments clip to 1.
pub fn log_plus(x: f64) -> f64 {
    x.ln().max(1.0)
}

/// Errors that signal broken run dynamics (non-finite iterates or oracle
/// output) rather than caller misuse; solvers convert these into a
/// guard-tripped trace instead of propagating them.
pub(crate) fn is_dynamics_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::NonFiniteInput { .. } | Error::NonFiniteOutput { .. }
    )
}

/// Converts a real-valued budget formula result into an iteration count,
/// rejecting non-finite or absurdly large values instead of wrapping.
pub(crate) fn checked_budget(iters: f64) -> Result<u64> {
    if !iters.is_finite() || iters < 0.0 || iters > 1e15 {
        return Err(Error::InvalidConfig(format!(
            "derived iteration budget {iters} is unusable; supply max_iters explicitly"
        )));
    }
    Ok(iters as u64)
}
