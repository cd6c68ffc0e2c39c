//! The general accelerated iteration and its two certified instantiations.

use crate::error::{Error, Result};
use crate::linesearch::{binary_line_search, EndpointSeed, LineSearchBranch, LineSearchParams};
use crate::omega::OmegaSequence;
use crate::oracle::{CountingOracle, Objective};
use crate::problem::{Optimum, Problem};
use crate::solvers::{checked_budget, is_dynamics_failure, log_plus, SolveOptions};
use crate::trace::{IterateRecord, SolverTrace, Termination};
use crate::vector;

/// Relative tolerance for the optional quasar-convexity spot check.
const QUASAR_CHECK_REL_TOL: f64 = 1e-9;
/// A run aborts once the measured gap exceeds this multiple of the initial
/// gap (subject to [`DIVERGENCE_FLOOR`]).
const DIVERGENCE_FACTOR: f64 = 1e6;
/// Absolute divergence floor, so a run started at (or numerically at) the
/// optimum is not tripped by roundoff noise.
const DIVERGENCE_FLOOR: f64 = 1e-9;
/// Relative slack when validating η^k against its floor γ/L, absorbing
/// floating-point drift in schedules that sit exactly on the floor.
const ETA_SLACK: f64 = 1e-9;
/// Relative slack for the certified convergence-envelope checks.
const CERTIFIED_BOUND_REL_SLACK: f64 = 1e-10;

/// Line-search coefficients for one iteration.
#[derive(Debug, Clone, Copy)]
pub struct SearchCoefficients {
    /// Quadratic relaxation weight b ≥ 0.
    pub b: f64,
    /// Value-difference weight c ≥ 0.
    pub c: f64,
    /// Additive slack ε̃ ≥ 0.
    pub eps_tilde: f64,
}

/// One iteration's schedule entry: the momentum step size and how to pick
/// the momentum weight α.
#[derive(Debug, Clone, Copy)]
pub struct StepPlan {
    /// Momentum step size η^k; must stay at or above the floor γ/L.
    pub eta: f64,
    /// Coefficients for the momentum-weight search; `None` fixes α = 1.
    pub search: Option<SearchCoefficients>,
}

/// Inputs of the general accelerated scheme: the momentum decay β, the
/// per-iteration schedule, and the iteration budget.
pub struct FrameworkConfig<S> {
    /// Momentum decay β ∈ [0, 1].
    pub beta: f64,
    /// Called exactly once per iteration, in order, with k = 0, 1, …
    pub schedule: S,
    /// Number of iterations to run (barring early termination).
    pub iters: u64,
}

/// Runs the general accelerated scheme with an explicit iteration budget.
///
/// The certified instantiations [`solve_strongly_qc`] and
/// [`solve_nonstrong_qc`] are thin wrappers over this; it is public so
/// custom β/η schedules can reuse the bookkeeping (records, guards,
/// target stopping, evaluation accounting).
pub fn run_framework<O, S>(
    problem: &Problem<O>,
    x0: &[f64],
    config: FrameworkConfig<S>,
    options: &SolveOptions,
) -> Result<SolverTrace>
where
    O: Objective,
    S: FnMut(u64) -> StepPlan,
{
    let FrameworkConfig { beta, schedule, iters } = config;
    run_with_budget(problem, x0, beta, schedule, move |_| Ok(iters), options)
}

/// One accelerated step, in place: y = αx + (1−α)v, a single counted oracle
/// call at y, then x ← y − (1/L)∇f(y) and v ← βv + (1−β)y − η∇f(y).
///
/// Returns f(y); the gradient at y is left in `grad_y`. Coordinates where
/// x, v, and the gradient are all exactly zero stay exactly zero, so
/// sparsity patterns flow through untouched.
pub fn agd_step(
    oracle: &CountingOracle<'_>,
    l_smooth: f64,
    beta: f64,
    eta: f64,
    alpha: f64,
    x: &mut [f64],
    v: &mut [f64],
    y: &mut [f64],
    grad_y: &mut [f64],
) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!(
            "momentum weight must lie in [0, 1], got {alpha}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidConfig(format!(
            "momentum decay must lie in [0, 1], got {beta}"
        )));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "momentum step size must be finite and positive, got {eta}"
        )));
    }
    if !(l_smooth.is_finite() && l_smooth > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "smoothness constant must be finite and positive, got {l_smooth}"
        )));
    }
    let n = x.len();
    for len in [v.len(), y.len(), grad_y.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }

    for i in 0..n {
        y[i] = alpha * x[i] + (1.0 - alpha) * v[i];
    }
    let f_y = oracle.eval(y, grad_y)?;
    let inv_l = 1.0 / l_smooth;
    for i in 0..n {
        let g = grad_y[i];
        x[i] = y[i] - inv_l * g;
        v[i] = beta * v[i] + (1.0 - beta) * y[i] - eta * g;
    }
    Ok(f_y)
}

/// Accelerated solver for the strongly quasar-convex case (μ > 0).
///
/// Runs the general scheme with constant momentum decay β = 1 − γ√(μ/L) and
/// momentum step η = 1/√(μL); the momentum weight α^k comes from the
/// bisection search with b = (1−β)/(2η), c = (Lη−γ)/β, and zero slack. At
/// the β = 0 boundary (γ√(μ/L) ≥ 1, e.g. γ = 1 with a perfectly conditioned
/// objective) every α^k = 1 and the scheme degenerates to gradient steps.
///
/// The iteration budget is `options.max_iters` when given; otherwise it is
/// derived from the target accuracy ε as ⌈(√κ/γ)·log⁺(3ε⁰/(γε))⌉ with
/// κ = L/μ and ε⁰ the measured initial gap, falling back to
/// `options.eps0_bound` when the optimum is unknown.
pub fn solve_strongly_qc<O: Objective>(
    problem: &Problem<O>,
    x0: &[f64],
    options: &SolveOptions,
) -> Result<SolverTrace> {
    if problem.mu <= 0.0 {
        return Err(Error::NeedsStrongCurvature);
    }
    let l = problem.l_smooth;
    let gamma = problem.gamma;
    let mu = problem.mu;
    // Clamps absorb floating-point drift only: mathematically
    // γ√(μ/L) ≤ 1 (so β ≥ 0) and 1/√(μL) ≥ γ/L whenever β > 0.
    let beta = (1.0 - gamma * (mu / l).sqrt()).clamp(0.0, 1.0);
    let eta = (1.0 / (mu * l).sqrt()).max(gamma / l);
    let plan = if beta > 0.0 {
        StepPlan {
            eta,
            search: Some(SearchCoefficients {
                b: (1.0 - beta) / (2.0 * eta),
                c: ((l * eta - gamma) / beta).max(0.0),
                eps_tilde: 0.0,
            }),
        }
    } else {
        StepPlan { eta, search: None }
    };

    let max_iters = options.max_iters;
    let target = options.target_accuracy;
    let eps0_fallback = options.eps0_bound;
    let sqrt_kappa = (l / mu).sqrt();
    let budget = move |measured_gap: Option<f64>| -> Result<u64> {
        if let Some(k) = max_iters {
            return Ok(k);
        }
        let missing = Error::MissingBudget {
            missing: "a known optimum or an initial-gap bound",
        };
        let eps = target.ok_or(missing)?;
        let eps0 = measured_gap
            .or(eps0_fallback)
            .ok_or(Error::MissingBudget {
                missing: "a known optimum or an initial-gap bound",
            })?
            .max(0.0);
        checked_budget((sqrt_kappa / gamma * log_plus(3.0 * eps0 / (gamma * eps))).ceil())
    };
    run_with_budget(problem, x0, beta, move |_| plan, budget, options)
}

/// Accelerated solver for the plain quasar-convex case.
///
/// Runs the general scheme with β = 1, the step-weight schedule
/// η^k = γ/(L·ω^k), and the bisection search with b = 0, c = Lη^k − γ, and
/// slack ε̃ = γε/2; a target accuracy is therefore always required. Strong
/// curvature is not used even when the problem declares μ > 0.
///
/// The iteration budget is `options.max_iters` when given; otherwise it is
/// ⌊4γ⁻¹√L·R/√ε⌋ with R the declared radius (or the measured ‖x⁰ − x*‖
/// when the optimum is known).
pub fn solve_nonstrong_qc<O: Objective>(
    problem: &Problem<O>,
    x0: &[f64],
    options: &SolveOptions,
) -> Result<SolverTrace> {
    options.validate()?;
    let eps = options.target_accuracy.ok_or_else(|| {
        Error::InvalidConfig(
            "the non-strong solver needs a target accuracy: its line-search slack is γε/2".into(),
        )
    })?;
    let l = problem.l_smooth;
    let gamma = problem.gamma;
    let eps_tilde = 0.5 * gamma * eps;

    let max_iters = options.max_iters;
    let radius = problem.radius;
    let measured_radius = problem
        .optimum
        .as_ref()
        .map(|o| vector::dist2(x0, &o.point).sqrt());
    let budget = move |_measured_gap: Option<f64>| -> Result<u64> {
        if let Some(k) = max_iters {
            return Ok(k);
        }
        let r = radius.or(measured_radius).ok_or(Error::MissingBudget {
            missing: "a declared search radius",
        })?;
        checked_budget((4.0 / gamma * l.sqrt() * r / eps.sqrt()).floor())
    };

    let mut step_weights = OmegaSequence::new();
    let schedule = move |_k: u64| -> StepPlan {
        let w = step_weights.next().expect("step-weight sequence is infinite");
        let eta = gamma / (l * w);
        StepPlan {
            eta,
            search: Some(SearchCoefficients {
                b: 0.0,
                c: (l * eta - gamma).max(0.0),
                eps_tilde,
            }),
        }
    };
    run_with_budget(problem, x0, 1.0, schedule, budget, options)
}

/// Iterations whose recorded potential Φ^k = gap + (μ/2)‖v − x*‖² exceeds
/// the strong solver's certified per-iteration contraction
/// Φ^(k+1) ≤ (1 − γ/√κ)·Φ^(k) + 1e-10·Φ^(0) with κ = L/μ.
///
/// Returns the indices k+1 of offending states; the final state (one past
/// the last record) is checked too. Runs without a known optimum record no
/// potentials and return empty.
pub fn strong_contraction_violations(
    trace: &SolverTrace,
    gamma: f64,
    condition_number: f64,
) -> Vec<u64> {
    let factor = 1.0 - gamma / condition_number.sqrt();
    let mut states: Vec<f64> = trace.records.iter().filter_map(|r| r.potential).collect();
    if let Some(p) = trace.final_potential {
        states.push(p);
    }
    let Some(&phi0) = states.first() else {
        return Vec::new();
    };
    let slack = CERTIFIED_BOUND_REL_SLACK * phi0;
    states
        .windows(2)
        .enumerate()
        .filter_map(|(i, pair)| (pair[1] > factor * pair[0] + slack).then_some((i + 1) as u64))
        .collect()
}

/// Iterations whose recorded gap exceeds the non-strong solver's certified
/// envelope ε^(k) ≤ 8/(k+2)²·(ε⁰ + L/(2γ²)·r⁰) + ε/2, with 1e-10 relative
/// slack; r⁰ is the squared distance of the start point from the optimum.
///
/// The final state is checked too, indexed one past the last record. Runs
/// without a known optimum have nothing to check and return empty.
pub fn nonstrong_envelope_violations(
    trace: &SolverTrace,
    l_smooth: f64,
    gamma: f64,
    epsilon: f64,
) -> Vec<u64> {
    let (Some(eps0), Some(first)) = (trace.initial_gap, trace.records.first()) else {
        return Vec::new();
    };
    let Some(r0) = first.dist2_v else {
        return Vec::new();
    };
    let amplitude = eps0 + l_smooth / (2.0 * gamma * gamma) * r0;
    let bound = |k: u64| {
        let t = k as f64 + 2.0;
        8.0 / (t * t) * amplitude + 0.5 * epsilon
    };
    let mut violations = Vec::new();
    for record in &trace.records {
        if let Some(gap) = record.f_gap {
            if gap > bound(record.k) * (1.0 + CERTIFIED_BOUND_REL_SLACK) {
                violations.push(record.k);
            }
        }
    }
    if let Some(gap) = trace.final_gap {
        let k = trace.records.len() as u64;
        if gap > bound(k) * (1.0 + CERTIFIED_BOUND_REL_SLACK) {
            violations.push(k);
        }
    }
    violations
}

/// Σ gᵢ·(aᵢ − bᵢ) without allocating the difference vector.
fn dot_diff(g: &[f64], a: &[f64], b: &[f64]) -> f64 {
    g.iter()
        .zip(a.iter())
        .zip(b.iter())
        .map(|((gi, ai), bi)| gi * (ai - bi))
        .sum()
}

/// Whether the declared (γ, μ) quasar-convexity inequality
/// f(x*) ≥ f(y) + (1/γ)∇f(y)ᵀ(x*−y) + (μ/2)‖x*−y‖² fails at y beyond
/// roundoff tolerance. A violation proves the declared constants wrong for
/// this objective.
pub(crate) fn quasar_inequality_violated(
    f_y: f64,
    grad_y: &[f64],
    y: &[f64],
    optimum: &Optimum,
    gamma: f64,
    mu: f64,
) -> bool {
    let cross = dot_diff(grad_y, &optimum.point, y);
    let rhs = f_y + cross / gamma + 0.5 * mu * vector::dist2(y, &optimum.point);
    let scale = 1.0_f64.max(f_y.abs()).max(optimum.value.abs());
    rhs - optimum.value > QUASAR_CHECK_REL_TOL * scale
}

/// The engine behind every accelerated run. `budget` is invoked once, after
/// the initial evaluation, with the measured initial gap (when the optimum
/// is known) so certified budget formulas can use it without a second
/// evaluation of the start point.
fn run_with_budget<O, S, B>(
    problem: &Problem<O>,
    x0: &[f64],
    beta: f64,
    mut schedule: S,
    budget: B,
    options: &SolveOptions,
) -> Result<SolverTrace>
where
    O: Objective,
    S: FnMut(u64) -> StepPlan,
    B: FnOnce(Option<f64>) -> Result<u64>,
{
    options.validate()?;
    if !((0.0..=1.0).contains(&beta) && beta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "momentum decay must lie in [0, 1], got {beta}"
        )));
    }
    let dim = problem.dim();
    if x0.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x0.len() });
    }
    if let Some(index) = vector::first_non_finite(x0) {
        return Err(Error::NonFiniteInput { what: "initial point", index });
    }

    let oracle = CountingOracle::new(&problem.objective);
    let optimum = problem.optimum.as_ref();
    let gamma = problem.gamma;
    let mu = problem.mu;
    let l = problem.l_smooth;
    let eta_floor = gamma / l * (1.0 - ETA_SLACK);

    let mut x = x0.to_vec();
    let mut v = x0.to_vec();
    let mut y = vec![0.0; dim];
    let mut grad_y = vec![0.0; dim];
    let mut grad_x = vec![0.0; dim];

    // Evaluate the start point once: it measures the initial gap and seeds
    // the first line search's α = 1 endpoint.
    let mut f_x = match oracle.eval(&x, &mut grad_x) {
        Ok(value) => value,
        Err(e) if is_dynamics_failure(&e) => {
            let counts = oracle.counts();
            return Ok(SolverTrace {
                records: Vec::new(),
                iterations: 0,
                final_point: x,
                final_momentum: v,
                final_gap: None,
                initial_gap: None,
                final_potential: None,
                termination: Termination::GuardTripped,
                total_fn_evals: counts.fn_evals,
                total_grad_evals: counts.grad_evals,
                quasar_violation_at: None,
            });
        }
        Err(e) => return Err(e),
    };
    // ∇f(x)ᵀ(x−v): exactly zero here since the iterates start identical.
    let mut slope_x = dot_diff(&grad_x, &x, &v);

    let initial_gap = optimum.map(|o| f_x - o.value);
    let iters = budget(initial_gap)?;
    let target = match (options.target_accuracy, optimum) {
        (Some(eps), Some(_)) => Some(eps),
        _ => None,
    };
    let divergence_limit = initial_gap.map(|g0| (DIVERGENCE_FACTOR * g0).max(DIVERGENCE_FLOOR));

    let mut records: Vec<IterateRecord> = Vec::new();
    let mut iterations: u64 = 0;
    let mut quasar_violation_at: Option<u64> = None;
    let mut memo_valid = true;

    let termination = 'run: {
        if let (Some(eps), Some(g0)) = (target, initial_gap) {
            if g0 <= eps {
                break 'run Termination::TargetReached;
            }
        }
        for k in 0..iters {
            if let Some(cap) = options.max_oracle_evals {
                if oracle.counts().fn_evals >= cap {
                    break 'run Termination::IterationBudget;
                }
            }
            let plan = schedule(k);
            let eta = plan.eta;
            if !(eta.is_finite() && eta >= eta_floor) {
                return Err(Error::InvalidConfig(format!(
                    "step size {eta} at iteration {k} is below the required floor γ/L = {:e}",
                    gamma / l
                )));
            }

            // Momentum weight: searched on the segment [v, x], or fixed at 1.
            let (alpha, linesearch_evals) = match plan.search {
                Some(co) => {
                    let params = LineSearchParams {
                        b: co.b,
                        c: co.c,
                        eps_tilde: co.eps_tilde,
                        l_smooth: l,
                        x: &x,
                        v: &v,
                    };
                    let seed = EndpointSeed { value: f_x, slope: slope_x };
                    match binary_line_search(&oracle, &params, Some(seed)) {
                        Ok(outcome) => {
                            if outcome.branch == LineSearchBranch::Guard {
                                // An uncertified α means the declared constants
                                // are wrong; surface it instead of continuing.
                                break 'run Termination::GuardTripped;
                            }
                            (outcome.alpha, outcome.evals)
                        }
                        Err(e) if is_dynamics_failure(&e) => break 'run Termination::GuardTripped,
                        Err(e) => return Err(e),
                    }
                }
                None => (1.0, 0),
            };

            // Entering-state diagnostics for this iteration's record.
            let f_gap = optimum.map(|o| f_x - o.value);
            let dist2_v = optimum.map(|o| vector::dist2(&v, &o.point));
            let potential = match (f_gap, dist2_v) {
                (Some(gap), Some(d2)) => Some(gap + 0.5 * mu * d2),
                _ => None,
            };
            let (snap_x, snap_v) = if options.keep_iterates {
                (Some(x.clone()), Some(v.clone()))
            } else {
                (None, None)
            };

            let f_y = match agd_step(&oracle, l, beta, eta, alpha, &mut x, &mut v, &mut y, &mut grad_y)
            {
                Ok(value) => value,
                Err(e) if is_dynamics_failure(&e) => break 'run Termination::GuardTripped,
                Err(e) => return Err(e),
            };
            let grad_norm_at_y = vector::norm(&grad_y);

            if options.check_quasar && quasar_violation_at.is_none() {
                if let Some(o) = optimum {
                    if quasar_inequality_violated(f_y, &grad_y, &y, o, gamma, mu) {
                        quasar_violation_at = Some(k);
                    }
                }
            }

            // Refresh the memoized endpoint state at the new x: one counted
            // call, reused as the next search's α = 1 seed and for stopping.
            match oracle.eval(&x, &mut grad_x) {
                Ok(value) => f_x = value,
                Err(e) if is_dynamics_failure(&e) => {
                    memo_valid = false;
                    break 'run Termination::GuardTripped;
                }
                Err(e) => return Err(e),
            }
            slope_x = dot_diff(&grad_x, &x, &v);

            let counts = oracle.counts();
            iterations += 1;
            if options.record_trajectory {
                records.push(IterateRecord {
                    k,
                    f_gap,
                    dist2_v,
                    potential,
                    alpha: Some(alpha),
                    eta: Some(eta),
                    grad_norm_at_y,
                    linesearch_evals,
                    cum_fn_evals: counts.fn_evals,
                    cum_grad_evals: counts.grad_evals,
                    x: snap_x,
                    v: snap_v,
                    y: options.keep_iterates.then(|| y.clone()),
                });
            }

            let new_gap = optimum.map(|o| f_x - o.value);
            if let (Some(eps), Some(gap)) = (target, new_gap) {
                if gap <= eps {
                    break 'run Termination::TargetReached;
                }
            }
            if let (Some(limit), Some(gap)) = (divergence_limit, new_gap) {
                if gap > limit {
                    break 'run Termination::GuardTripped;
                }
            }
        }
        Termination::IterationBudget
    };

    let final_gap = if memo_valid {
        optimum.map(|o| f_x - o.value)
    } else {
        None
    };
    let final_potential = match (final_gap, optimum) {
        (Some(gap), Some(o)) => Some(gap + 0.5 * mu * vector::dist2(&v, &o.point)),
        _ => None,
    };
    let counts = oracle.counts();
    Ok(SolverTrace {
        records,
        iterations,
        final_point: x,
        final_momentum: v,
        final_gap,
        initial_gap,
        final_potential,
        termination,
        total_fn_evals: counts.fn_evals,
        total_grad_evals: counts.grad_evals,
        quasar_violation_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{DiagonalQuadratic, SpectrumShape};
    use crate::oracle::FnObjective;

    fn half_norm2(dim: usize) -> FnObjective<impl Fn(&[f64], &mut [f64]) -> f64 + Send + Sync> {
        FnObjective::new(dim, |x: &[f64], grad: &mut [f64]| {
            grad.copy_from_slice(x);
            0.5 * vector::norm2(x)
        })
    }

    /// Oracle-call identity: initial evaluation plus, per executed
    /// iteration, the line-search queries, the evaluation at y, and the
    /// memo refresh at the new x.
    fn assert_eval_accounting(trace: &SolverTrace) {
        let expected: u64 = 1 + trace
            .records
            .iter()
            .map(|r| r.linesearch_evals + 2)
            .sum::<u64>();
        assert_eq!(
            trace.total_fn_evals, expected,
            "evaluation accounting identity must hold exactly"
        );
        assert_eq!(trace.total_fn_evals, trace.total_grad_evals);
    }

    #[test]
    fn one_step_exact_on_identity_quadratic() {
        // 1-D ½x² with L = μ = γ = 1: β = 0, η = 1, α = 1, and a single
        // step lands exactly on the optimum: y = 1, x⁺ = 0, v⁺ = 0.
        let objective = half_norm2(1);
        let oracle = CountingOracle::new(&objective);
        let mut x = vec![1.0];
        let mut v = vec![1.0];
        let mut y = vec![0.0];
        let mut grad_y = vec![0.0];
        let f_y = agd_step(&oracle, 1.0, 0.0, 1.0, 1.0, &mut x, &mut v, &mut y, &mut grad_y)
            .expect("step succeeds");
        assert_eq!(y, vec![1.0], "y = αx + (1−α)v with α = 1 copies x");
        assert_eq!(f_y, 0.5);
        assert_eq!(x, vec![0.0], "x⁺ = y − ∇f(y) must be exactly zero");
        assert_eq!(v, vec![0.0], "v⁺ = βv + (1−β)y − η∇f(y) must be exactly zero");
        assert_eq!(oracle.counts().fn_evals, 1, "exactly one counted call");
    }

    #[test]
    fn constant_momentum_override_keeps_both_iterates() {
        // β = 1, η = γ/L, α = 1: x⁺ = x − (1/L)∇f(x) while
        // v⁺ = v − (γ/L)∇f(x).
        let objective = half_norm2(1);
        let oracle = CountingOracle::new(&objective);
        let (l, gamma) = (1.0, 0.5);
        let mut x = vec![1.0];
        let mut v = vec![1.0];
        let mut y = vec![0.0];
        let mut grad_y = vec![0.0];
        agd_step(&oracle, l, 1.0, gamma / l, 1.0, &mut x, &mut v, &mut y, &mut grad_y)
            .expect("step succeeds");
        assert_eq!(x, vec![0.0]);
        assert_eq!(v, vec![0.5], "momentum iterate moves by the η-weighted gradient only");
    }

    #[test]
    fn fixed_point_at_the_optimum() {
        let objective = half_norm2(2);
        let oracle = CountingOracle::new(&objective);
        let mut x = vec![0.0, 0.0];
        let mut v = vec![0.0, 0.0];
        let mut y = vec![1.0, 1.0];
        let mut grad_y = vec![1.0, 1.0];
        agd_step(&oracle, 1.0, 0.5, 1.0, 0.25, &mut x, &mut v, &mut y, &mut grad_y)
            .expect("step succeeds");
        assert_eq!(x, vec![0.0, 0.0], "optimum is a fixed point of the x update");
        assert_eq!(v, vec![0.0, 0.0], "optimum is a fixed point of the v update");
    }

    #[test]
    fn agd_step_rejects_bad_inputs() {
        let objective = half_norm2(1);
        let oracle = CountingOracle::new(&objective);
        let mut x = vec![1.0];
        let mut v = vec![1.0];
        let mut y = vec![0.0];
        let mut g = vec![0.0];
        assert!(agd_step(&oracle, 1.0, 0.0, 1.0, 1.5, &mut x, &mut v, &mut y, &mut g).is_err());
        assert!(agd_step(&oracle, 1.0, -0.1, 1.0, 1.0, &mut x, &mut v, &mut y, &mut g).is_err());
        assert!(agd_step(&oracle, 1.0, 0.0, 0.0, 1.0, &mut x, &mut v, &mut y, &mut g).is_err());
        assert!(agd_step(&oracle, 0.0, 0.0, 1.0, 1.0, &mut x, &mut v, &mut y, &mut g).is_err());
        let mut short = vec![0.0; 0];
        assert!(agd_step(&oracle, 1.0, 0.0, 1.0, 1.0, &mut x, &mut short, &mut y, &mut g).is_err());
    }

    #[test]
    fn strong_solver_hand_trace() {
        let objective = half_norm2(1);
        let problem = Problem::new(objective, 1.0, 1.0, 1.0)
            .unwrap()
            .with_optimum(vec![0.0], 0.0)
            .unwrap();
        let options = SolveOptions {
            target_accuracy: Some(1e-12),
            ..SolveOptions::default()
        };
        let trace = solve_strongly_qc(&problem, &[1.0], &options).expect("solve succeeds");
        assert_eq!(trace.termination, Termination::TargetReached);
        assert_eq!(trace.records.len(), 1, "perfectly conditioned: one step");
        assert_eq!(trace.final_point, vec![0.0], "exact optimum in one step");
        assert_eq!(trace.final_momentum, vec![0.0]);
        assert_eq!(trace.final_gap, Some(0.0));
        assert_eq!(trace.initial_gap, Some(0.5));
        let record = &trace.records[0];
        assert_eq!(record.alpha, Some(1.0), "β = 0 fixes α = 1 without a search");
        assert_eq!(record.linesearch_evals, 0);
        assert_eq!(record.f_gap, Some(0.5));
        assert_eq!(record.potential, Some(0.5 + 0.5 * 1.0));
        assert!(trace.is_contiguous());
        assert_eq!(trace.quasar_violation_at, None);
        assert_eval_accounting(&trace);
    }

    #[test]
    fn start_at_optimum_returns_immediately() {
        let objective = half_norm2(1);
        let problem = Problem::new(objective, 1.0, 1.0, 1.0)
            .unwrap()
            .with_optimum(vec![0.0], 0.0)
            .unwrap();
        let options = SolveOptions {
            target_accuracy: Some(1e-12),
            ..SolveOptions::default()
        };
        let trace = solve_strongly_qc(&problem, &[0.0], &options).expect("solve succeeds");
        assert_eq!(trace.termination, Termination::TargetReached);
        assert!(trace.records.is_empty(), "no iterations executed");
        assert_eq!(trace.total_fn_evals, 1, "only the initial evaluation");
        assert_eq!(trace.final_gap, Some(0.0));
    }

    #[test]
    fn strong_solver_contracts_on_conditioned_quadratic() {
        let (mu, l) = (0.25, 1.0);
        let quadratic =
            DiagonalQuadratic::from_spectrum(5, mu, l, SpectrumShape::LogSpaced, vec![0.0; 5])
                .expect("valid spectrum");
        let problem = quadratic.problem().expect("valid problem");
        let x0 = [1.0, -1.0, 2.0, 0.5, -0.3];
        let eps = 1e-10;
        let options = SolveOptions {
            target_accuracy: Some(eps),
            ..SolveOptions::default()
        };
        let trace = solve_strongly_qc(&problem, &x0, &options).expect("solve succeeds");
        assert_eq!(trace.termination, Termination::TargetReached);
        assert_eq!(trace.quasar_violation_at, None, "γ = 1 quadratic is honest");
        assert!(
            strong_contraction_violations(&trace, problem.gamma, l / mu).is_empty(),
            "per-iteration potential contraction must hold"
        );

        // Within the certified budget for the measured initial gap.
        let eps0 = trace.initial_gap.expect("optimum known");
        let k_bound = ((l / mu).sqrt() / problem.gamma
            * log_plus(3.0 * eps0 / (problem.gamma * eps)))
        .ceil() as u64;
        assert!(
            (trace.records.len() as u64) <= k_bound,
            "{} executed iterations exceed the certified budget {k_bound}",
            trace.records.len()
        );

        // Framework invariants on every record.
        let eta_floor = problem.gamma / l;
        for record in &trace.records {
            let alpha = record.alpha.expect("accelerated record has α");
            let eta = record.eta.expect("accelerated record has η");
            assert!((0.0..=1.0).contains(&alpha), "α out of range: {alpha}");
            assert!(eta >= eta_floor * (1.0 - 1e-12), "η below floor: {eta}");
        }
        // Potentials never increase (factor < 1 plus tiny slack).
        let potentials: Vec<f64> = trace
            .records
            .iter()
            .map(|r| r.potential.unwrap())
            .chain(trace.final_potential)
            .collect();
        for pair in potentials.windows(2) {
            assert!(
                pair[1] <= pair[0] * (1.0 + 1e-12) + 1e-30,
                "potential increased: {} -> {}",
                pair[0],
                pair[1]
            );
        }
        assert_eval_accounting(&trace);
    }

    #[test]
    fn nonstrong_solver_meets_envelope_on_quadratic() {
        let objective = half_norm2(3);
        let x0 = [3.0, -4.0, 0.0];
        let problem = Problem::new(objective, 1.0, 1.0, 0.0)
            .unwrap()
            .with_radius(5.0)
            .unwrap()
            .with_optimum(vec![0.0; 3], 0.0)
            .unwrap();
        let eps = 1e-6;
        let options = SolveOptions {
            target_accuracy: Some(eps),
            ..SolveOptions::default()
        };
        let trace = solve_nonstrong_qc(&problem, &x0, &options).expect("solve succeeds");
        assert_eq!(trace.termination, Termination::TargetReached);
        assert!(trace.final_gap.unwrap() <= eps);
        assert_eq!(trace.quasar_violation_at, None);
        assert!(
            nonstrong_envelope_violations(&trace, problem.l_smooth, problem.gamma, eps).is_empty(),
            "certified error envelope must hold at every iteration"
        );
        let k_bound = (4.0 / problem.gamma * problem.l_smooth.sqrt() * 5.0 / eps.sqrt()).floor()
            as u64;
        assert!((trace.records.len() as u64) <= k_bound);

        // First step weight is the inverse golden ratio: η⁰ = γ/(L·ω⁰).
        let eta0 = trace.records[0].eta.unwrap();
        let expected = 1.0 / 0.618_033_988_749_894_9;
        assert!(
            (eta0 - expected).abs() <= 1e-12 * expected,
            "η⁰ = {eta0}, expected {expected}"
        );
        assert_eval_accounting(&trace);
    }

    #[test]
    fn nonstrong_solver_requires_target_accuracy() {
        let objective = half_norm2(1);
        let problem = Problem::new(objective, 1.0, 1.0, 0.0).unwrap();
        let err = solve_nonstrong_qc(&problem, &[1.0], &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)), "got {err:?}");
    }

    #[test]
    fn strong_solver_requires_strong_curvature() {
        let objective = half_norm2(1);
        let problem = Problem::new(objective, 1.0, 1.0, 0.0).unwrap();
        let options = SolveOptions {
            target_accuracy: Some(1e-6),
            ..SolveOptions::default()
        };
        let err = solve_strongly_qc(&problem, &[1.0], &options).unwrap_err();
        assert!(matches!(err, Error::NeedsStrongCurvature), "got {err:?}");
    }

    #[test]
    fn budget_resolution_failures() {
        // Strong solver, optimum unknown, no initial-gap bound.
        let problem = Problem::new(half_norm2(1), 1.0, 1.0, 1.0).unwrap();
        let options = SolveOptions {
            target_accuracy: Some(1e-6),
            ..SolveOptions::default()
        };
        let err = solve_strongly_qc(&problem, &[1.0], &options).unwrap_err();
        assert!(matches!(err, Error::MissingBudget { .. }), "got {err:?}");

        // Non-strong solver, no radius and no optimum.
        let problem = Problem::new(half_norm2(1), 1.0, 1.0, 0.0).unwrap();
        let err = solve_nonstrong_qc(&problem, &[1.0], &options).unwrap_err();
        assert!(matches!(err, Error::MissingBudget { .. }), "got {err:?}");
    }

    #[test]
    fn eps0_bound_substitutes_for_unknown_optimum() {
        let problem = Problem::new(half_norm2(1), 1.0, 1.0, 1.0).unwrap();
        let options = SolveOptions {
            target_accuracy: Some(1e-9),
            eps0_bound: Some(0.5),
            ..SolveOptions::default()
        };
        let trace = solve_strongly_qc(&problem, &[1.0], &options).expect("solve succeeds");
        // No optimum: no target stopping, so the full certified budget runs.
        assert_eq!(trace.termination, Termination::IterationBudget);
        assert_eq!(trace.initial_gap, None);
        assert_eq!(trace.final_gap, None);
        // ½x² from x⁰ = 1 with κ = γ = 1 converges despite blind stopping.
        assert!(trace.final_point[0].abs() < 1e-6);
    }

    #[test]
    fn explicit_iteration_budget_overrides_formulas() {
        let problem = Problem::new(half_norm2(2), 1.0, 1.0, 0.0).unwrap();
        let options = SolveOptions {
            max_iters: Some(3),
            target_accuracy: Some(1e-16),
            ..SolveOptions::default()
        };
        // No radius, no optimum: only possible because K is explicit.
        let trace = solve_nonstrong_qc(&problem, &[10.0, -3.0], &options).expect("solve succeeds");
        assert_eq!(trace.termination, Termination::IterationBudget);
        assert_eq!(trace.records.len(), 3);
        assert_eval_accounting(&trace);
    }

    #[test]
    fn divergence_guard_trips_on_understated_smoothness() {
        // True curvature 100, declared L = 1: gradient steps overshoot and
        // the measured gap explodes.
        let objective = FnObjective::new(1, |x: &[f64], grad: &mut [f64]| {
            grad[0] = 100.0 * x[0];
            50.0 * x[0] * x[0]
        });
        let problem = Problem::new(objective, 1.0, 1.0, 1.0)
            .unwrap()
            .with_optimum(vec![0.0], 0.0)
            .unwrap();
        let options = SolveOptions {
            max_iters: Some(100),
            ..SolveOptions::default()
        };
        let trace = solve_strongly_qc(&problem, &[1.0], &options).expect("solve returns a trace");
        assert_eq!(trace.termination, Termination::GuardTripped);
        assert_eq!(
            trace.records.len(),
            2,
            "gap passes 10⁶·ε⁰ = 5e7 on the second overshoot (×9801 each)"
        );
        assert!(trace.final_gap.unwrap() > 1e6 * trace.initial_gap.unwrap());
    }

    #[test]
    fn evaluation_cap_stops_between_iterations() {
        // β = 0 path: exactly 2 calls per iteration after the initial one.
        let problem = Problem::new(half_norm2(1), 1.0, 1.0, 1.0).unwrap();
        let options = SolveOptions {
            max_iters: Some(100),
            max_oracle_evals: Some(8),
            ..SolveOptions::default()
        };
        let trace = solve_strongly_qc(&problem, &[1.0], &options).expect("solve succeeds");
        assert_eq!(trace.termination, Termination::IterationBudget);
        assert_eq!(trace.records.len(), 4, "counts 1,3,5,7 pass the cap 8; 9 does not");
        assert_eq!(trace.total_fn_evals, 9, "cap checked between iterations");
    }

    #[test]
    fn quasar_check_flags_wrong_declaration_at_saddle() {
        // x⁴ − x² has a stationary local max at 0 with value above the
        // minimum −1/4: no γ makes the quasar inequality hold at x = 0, so
        // declaring (γ=1, μ=0) must be flagged on the very first iteration
        // (y⁰ is the start point). The gradient vanishes there, so the run
        // then sits at the saddle until the budget runs out.
        let objective = FnObjective::new(1, |x: &[f64], grad: &mut [f64]| {
            let t = x[0];
            grad[0] = 4.0 * t * t * t - 2.0 * t;
            t * t * t * t - t * t
        });
        let problem = Problem::new(objective, 10.0, 1.0, 0.0)
            .unwrap()
            .with_radius(2.0)
            .unwrap()
            .with_optimum(vec![std::f64::consts::FRAC_1_SQRT_2], -0.25)
            .unwrap();
        let options = SolveOptions {
            target_accuracy: Some(1e-3),
            ..SolveOptions::default()
        };
        let trace = solve_nonstrong_qc(&problem, &[0.0], &options).expect("solve succeeds");
        assert_eq!(trace.quasar_violation_at, Some(0));
        assert_eq!(trace.termination, Termination::IterationBudget);
        assert_eq!(trace.final_point, vec![0.0], "saddle is a fixed point");
    }

    #[test]
    fn runs_are_deterministic() {
        let quadratic =
            DiagonalQuadratic::from_spectrum(4, 0.01, 1.0, SpectrumShape::LogSpaced, vec![0.0; 4])
                .expect("valid spectrum");
        let problem = quadratic.problem().expect("valid problem");
        let options = SolveOptions {
            target_accuracy: Some(1e-8),
            ..SolveOptions::default()
        };
        let x0 = [0.3, -2.0, 1.1, 0.7];
        let a = solve_strongly_qc(&problem, &x0, &options).expect("first run");
        let b = solve_strongly_qc(&problem, &x0, &options).expect("second run");
        assert_eq!(a.final_point, b.final_point, "bit-identical final iterate");
        assert_eq!(a.total_fn_evals, b.total_fn_evals);
        assert_eq!(a.records.len(), b.records.len());
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.alpha, rb.alpha);
            assert_eq!(ra.linesearch_evals, rb.linesearch_evals);
        }
    }

    #[test]
    fn iterate_snapshots_on_request() {
        let problem = Problem::new(half_norm2(1), 1.0, 1.0, 1.0)
            .unwrap()
            .with_optimum(vec![0.0], 0.0)
            .unwrap();
        let options = SolveOptions {
            target_accuracy: Some(1e-12),
            keep_iterates: true,
            ..SolveOptions::default()
        };
        let trace = solve_strongly_qc(&problem, &[1.0], &options).expect("solve succeeds");
        let record = &trace.records[0];
        assert_eq!(record.x.as_deref(), Some(&[1.0][..]), "entering x snapshot");
        assert_eq!(record.v.as_deref(), Some(&[1.0][..]), "entering v snapshot");
        assert_eq!(record.y.as_deref(), Some(&[1.0][..]), "blend point snapshot");
    }

    #[test]
    fn custom_framework_schedule_runs() {
        let problem = Problem::new(half_norm2(1), 1.0, 0.5, 0.0).unwrap();
        let config = FrameworkConfig {
            beta: 1.0,
            schedule: |_k| StepPlan { eta: 0.5, search: None },
            iters: 1,
        };
        let trace =
            run_framework(&problem, &[1.0], config, &SolveOptions::default()).expect("runs");
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.final_point, vec![0.0], "x⁺ = x − ∇f(x)/L");
        assert_eq!(trace.final_momentum, vec![0.5], "v⁺ = v − η∇f(x) with η = γ/L");
    }

    #[test]
    fn schedule_below_step_floor_is_rejected() {
        let problem = Problem::new(half_norm2(1), 1.0, 0.5, 0.0).unwrap();
        let config = FrameworkConfig {
            beta: 1.0,
            schedule: |_k| StepPlan { eta: 0.25, search: None },
            iters: 1,
        };
        let err = run_framework(&problem, &[1.0], config, &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)), "γ/L = 0.5 > η = 0.25: {err:?}");
    }

    #[test]
    fn envelope_and_contraction_checks_ignore_blind_runs() {
        let problem = Problem::new(half_norm2(1), 1.0, 1.0, 0.0).unwrap();
        let options = SolveOptions {
            max_iters: Some(2),
            target_accuracy: Some(1e-9),
            ..SolveOptions::default()
        };
        let trace = solve_nonstrong_qc(&problem, &[1.0], &options).expect("solve succeeds");
        assert!(nonstrong_envelope_violations(&trace, 1.0, 1.0, 1e-9).is_empty());
        assert!(strong_contraction_violations(&trace, 1.0, 1.0).is_empty());
    }

    #[test]
    fn initial_point_validation() {
        let problem = Problem::new(half_norm2(2), 1.0, 1.0, 1.0).unwrap();
        let options = SolveOptions {
            max_iters: Some(1),
            ..SolveOptions::default()
        };
        let err = solve_strongly_qc(&problem, &[1.0], &options).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let err = solve_strongly_qc(&problem, &[1.0, f64::NAN], &options).unwrap_err();
        assert!(matches!(err, Error::NonFiniteInput { .. }));
    }
}
