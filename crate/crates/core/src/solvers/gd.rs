//! Plain gradient descent with the 1/L step, the comparison baseline.

use crate::error::{Error, Result};
use crate::oracle::{CountingOracle, Objective};
use crate::problem::Problem;
use crate::solvers::framework::quasar_inequality_violated;
use crate::solvers::{is_dynamics_failure, SolveOptions};
use crate::trace::{IterateRecord, SolverTrace, Termination};
use crate::vector;

/// Gradient descent: x^(k+1) = x^(k) − (1/L)∇f(x^(k)).
///
/// Each iteration costs exactly one combined oracle call; one further call
/// evaluates the final point, so a run of K steps makes K + 1 calls. Since
/// the method has no momentum iterate, records leave `alpha`/`eta` unset and
/// the distance diagnostics refer to x itself; `final_momentum` equals
/// `final_point`.
///
/// Budget: `max_iters` when given. Without it, a target accuracy with a
/// known optimum (or an evaluation cap) lets the run stop on its own, but a
/// stalling objective then runs until the divergence guard or cap fires —
/// supply `max_iters` when stalls are possible.
pub fn solve_gd<O: Objective>(
    problem: &Problem<O>,
    x0: &[f64],
    options: &SolveOptions,
) -> Result<SolverTrace> {
    options.validate()?;
    let dim = problem.dim();
    if x0.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x0.len() });
    }
    if let Some(index) = vector::first_non_finite(x0) {
        return Err(Error::NonFiniteInput { what: "initial point", index });
    }
    let budget_iters = match options.max_iters {
        Some(k) => k,
        None => {
            let can_stop = (options.target_accuracy.is_some() && problem.optimum.is_some())
                || options.max_oracle_evals.is_some();
            if !can_stop {
                return Err(Error::MissingBudget { missing: "a known optimum" });
            }
            u64::MAX
        }
    };

    let oracle = CountingOracle::new(&problem.objective);
    let optimum = problem.optimum.as_ref();
    let inv_l = 1.0 / problem.l_smooth;
    let mu = problem.mu;

    let mut x = x0.to_vec();
    let mut grad = vec![0.0; dim];
    let mut records: Vec<IterateRecord> = Vec::new();
    let mut iterations: u64 = 0;
    let mut initial_gap = None;
    let mut last_gap;
    let mut divergence_limit = None;
    let mut quasar_violation_at = None;

    let termination = 'run: {
        let mut k = 0u64;
        loop {
            let value = match oracle.eval(&x, &mut grad) {
                Ok(value) => value,
                Err(e) if is_dynamics_failure(&e) => {
                    last_gap = None;
                    break 'run Termination::GuardTripped;
                }
                Err(e) => return Err(e),
            };
            let gap = optimum.map(|o| value - o.value);
            last_gap = gap;
            if k == 0 {
                initial_gap = gap;
                divergence_limit = gap.map(|g0| (1e6 * g0).max(1e-9));
            }
            if options.check_quasar && quasar_violation_at.is_none() {
                if let Some(o) = optimum {
                    if quasar_inequality_violated(value, &grad, &x, o, problem.gamma, mu) {
                        quasar_violation_at = Some(k);
                    }
                }
            }
            if let (Some(eps), Some(g)) = (options.target_accuracy, gap) {
                if g <= eps {
                    break 'run Termination::TargetReached;
                }
            }
            if let (Some(limit), Some(g)) = (divergence_limit, gap) {
                if g > limit {
                    break 'run Termination::GuardTripped;
                }
            }
            if k >= budget_iters {
                break 'run Termination::IterationBudget;
            }
            if let Some(cap) = options.max_oracle_evals {
                if oracle.counts().fn_evals >= cap {
                    break 'run Termination::IterationBudget;
                }
            }

            let counts = oracle.counts();
            iterations += 1;
            if options.record_trajectory {
                records.push(IterateRecord {
                    k,
                    f_gap: gap,
                    dist2_v: optimum.map(|o| vector::dist2(&x, &o.point)),
                    potential: match (gap, optimum) {
                        (Some(g), Some(o)) => Some(g + 0.5 * mu * vector::dist2(&x, &o.point)),
                        _ => None,
                    },
                    alpha: None,
                    eta: None,
                    grad_norm_at_y: vector::norm(&grad),
                    linesearch_evals: 0,
                    cum_fn_evals: counts.fn_evals,
                    cum_grad_evals: counts.grad_evals,
                    x: options.keep_iterates.then(|| x.clone()),
                    v: None,
                    y: None,
                });
            }
            for i in 0..dim {
                x[i] -= inv_l * grad[i];
            }
            k += 1;
        }
    };

    let final_potential = match (last_gap, optimum) {
        (Some(gap), Some(o)) => Some(gap + 0.5 * mu * vector::dist2(&x, &o.point)),
        _ => None,
    };
    let counts = oracle.counts();
    Ok(SolverTrace {
        records,
        iterations,
        final_momentum: x.clone(),
        final_point: x,
        final_gap: last_gap,
        initial_gap,
        final_potential,
        termination,
        total_fn_evals: counts.fn_evals,
        total_grad_evals: counts.grad_evals,
        quasar_violation_at,
    })
}
