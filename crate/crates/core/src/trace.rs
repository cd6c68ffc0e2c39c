//! Per-iteration solver records and the run-level trace.

/// Why a solver run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The iteration budget was exhausted (includes the evaluation cap).
    IterationBudget,
    /// The known-optimum gap dropped to the requested accuracy.
    TargetReached,
    /// A non-finite iterate or a divergence guard fired.
    GuardTripped,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::IterationBudget => "iteration-budget",
            Termination::TargetReached => "target-reached",
            Termination::GuardTripped => "guard-tripped",
        }
    }
}

/// Diagnostics for one solver iteration.
///
/// Scalar fields are always recorded. The error/distance fields need the
/// known optimum and are `None` without it. Full iterate snapshots are kept
/// only when requested: long runs on high-dimensional instances would
/// otherwise hold gigabytes of history.
#[derive(Debug, Clone, Default)]
pub struct IterateRecord {
    pub k: u64,
    /// f(x^k) − f*, entering the iteration (needs known optimum).
    pub f_gap: Option<f64>,
    /// ‖v^k − x*‖² (needs known optimum).
    pub dist2_v: Option<f64>,
    /// f_gap + (μ/2)·dist2_v, the strong-case potential (needs known optimum).
    pub potential: Option<f64>,
    /// Momentum weight chosen this iteration; `None` for plain gradient descent.
    pub alpha: Option<f64>,
    /// Aggressive step size η^k; `None` for plain gradient descent.
    pub eta: Option<f64>,
    /// ‖∇f(y^k)‖ at the point the gradient step was taken from.
    pub grad_norm_at_y: f64,
    /// Oracle calls made by this iteration's line search.
    pub linesearch_evals: u64,
    /// Counter snapshots after this iteration's evaluations.
    pub cum_fn_evals: u64,
    pub cum_grad_evals: u64,
    /// Optional iterate snapshots (see `SolveOptions::keep_iterates`).
    pub x: Option<Vec<f64>>,
    pub v: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
}

/// Complete record of one solver run.
#[derive(Debug, Clone)]
pub struct SolverTrace {
    /// One record per executed iteration, ordered by `k` with no gaps.
    /// Empty when the run was made with trajectory recording off.
    pub records: Vec<IterateRecord>,
    /// Iterations executed. Equals `records.len()` when trajectory
    /// recording is on; still counted when it is off.
    pub iterations: u64,
    pub final_point: Vec<f64>,
    /// Final momentum iterate. Equals `final_point` for plain gradient descent.
    pub final_momentum: Vec<f64>,
    /// f(final_point) − f* when the optimum is known.
    pub final_gap: Option<f64>,
    /// f(x⁰) − f* when the optimum is known: the gap the run started from.
    pub initial_gap: Option<f64>,
    /// final_gap + (μ/2)·‖final_momentum − x*‖² when the optimum is known.
    pub final_potential: Option<f64>,
    pub termination: Termination,
    /// Total combined oracle calls made by the run.
    pub total_fn_evals: u64,
    pub total_grad_evals: u64,
    /// First iteration at which the declared (γ, μ) quasar inequality was
    /// observed to fail at y^k (needs known optimum). A value here means the
    /// declared constants are wrong for this objective.
    pub quasar_violation_at: Option<u64>,
}

impl SolverTrace {
    /// Records are ordered by k starting at 0 with no gaps.
    pub fn is_contiguous(&self) -> bool {
        self.records.iter().enumerate().all(|(i, r)| r.k == i as u64)
    }
}
