//! End-to-end solver certification on quadratics and hard instances.
//!
//! Exercises the strong solver's per-iteration potential contraction and
//! iteration bound on an ill-conditioned quadratic, the non-strong solver's
//! accuracy envelope on both a quadratic and a scaled chain instance, and
//! the information lower bound on the chain: solvers started at the origin
//! reveal at most one coordinate per oracle call and therefore cannot reach
//! the target accuracy before half the chain has been queried.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use quasar_opt::instances::{DiagonalQuadratic, HardInstanceScaled, SpectrumShape};
use quasar_opt::solvers::{log_plus, nonstrong_envelope_violations, strong_contraction_violations};
use quasar_opt::verify::{run_with_prefix_instrumentation, PrefixTrace};
use quasar_opt::{
    solve_gd, solve_nonstrong_qc, solve_strongly_qc, solve_via_regularization, Problem,
    SolveOptions, SolverTrace, Termination,
};

/// Start-point distance used by the quadratic scenarios.
const START_DISTANCE: f64 = 10.0;

/// A seeded point at exactly `START_DISTANCE` from `center`.
fn offset_start(center: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dir: Vec<f64> = (0..center.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = quasar_opt::vector::norm(&dir);
    center
        .iter()
        .zip(dir.iter())
        .map(|(c, d)| c + START_DISTANCE * d / norm)
        .collect()
}

fn conditioned_quadratic(rng: &mut ChaCha8Rng) -> DiagonalQuadratic {
    let center: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DiagonalQuadratic::from_spectrum(50, 1e-4, 1.0, SpectrumShape::LogSpaced, center).unwrap()
}

#[test]
fn strong_solver_contracts_and_meets_iteration_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11_213);
    let quadratic = conditioned_quadratic(&mut rng);
    let x0 = offset_start(quadratic.center(), &mut rng);
    let problem = quadratic.problem().unwrap();
    let eps = 1e-9;

    let options = SolveOptions {
        target_accuracy: Some(eps),
        ..SolveOptions::default()
    };
    let trace = solve_strongly_qc(&problem, &x0, &options).unwrap();

    assert_eq!(
        trace.termination,
        Termination::TargetReached,
        "strong solver must reach 1e-9 on the conditioned quadratic, final gap {:?}",
        trace.final_gap
    );
    assert!(
        trace.final_gap.unwrap() <= eps,
        "final gap {} above target",
        trace.final_gap.unwrap()
    );
    assert_eq!(
        trace.quasar_violation_at, None,
        "monitoring must not flag the quadratic"
    );

    let condition_number = 1.0 / 1e-4;
    let violations = strong_contraction_violations(&trace, 1.0, condition_number);
    assert!(
        violations.is_empty(),
        "potential contraction violated at iterations {violations:?}"
    );

    // Iteration count stays within the certified budget computed from the
    // measured initial gap.
    let eps0 = trace.initial_gap.unwrap();
    let budget = (condition_number.sqrt() * log_plus(3.0 * eps0 / eps)).ceil() as u64;
    assert!(
        (trace.records.len() as u64) <= budget,
        "spent {} iterations, certified budget {budget}",
        trace.records.len()
    );
    assert!(trace.is_contiguous(), "iteration records must be gapless");
}

/// Asserts the envelope checker had everything it needs and found no
/// violating iteration.
fn assert_envelope_clean(trace: &SolverTrace, l: f64, gamma: f64, eps: f64, label: &str) {
    assert!(
        trace.initial_gap.is_some(),
        "{label}: envelope check needs the initial gap"
    );
    assert!(
        trace
            .records
            .first()
            .is_some_and(|r| r.dist2_v.is_some() && r.f_gap.is_some()),
        "{label}: envelope check needs recorded gaps and momentum distances"
    );
    let violations = nonstrong_envelope_violations(trace, l, gamma, eps);
    assert!(
        violations.is_empty(),
        "{label}: envelope violated at iterations {violations:?}"
    );
}

#[test]
fn nonstrong_solver_respects_envelope_on_quadratic() {
    let mut rng = ChaCha8Rng::seed_from_u64(65_537);
    let quadratic = conditioned_quadratic(&mut rng);
    let x0 = offset_start(quadratic.center(), &mut rng);
    let center = quadratic.center().to_vec();
    // Same objective, but solved without exploiting curvature: μ = 0.
    let problem = Problem::new(quadratic, 1.0, 1.0, 0.0)
        .unwrap()
        .with_optimum(center, 0.0)
        .unwrap();
    let eps = 1e-8;

    let options = SolveOptions {
        target_accuracy: Some(eps),
        ..SolveOptions::default()
    };
    let trace = solve_nonstrong_qc(&problem, &x0, &options).unwrap();
    assert_eq!(
        trace.termination,
        Termination::TargetReached,
        "non-strong solver must reach {eps} on the quadratic, final gap {:?}",
        trace.final_gap
    );
    assert_envelope_clean(&trace, 1.0, 1.0, eps, "quadratic");
}

#[test]
fn nonstrong_solver_respects_envelope_on_hard_instance() {
    let scaled = HardInstanceScaled::from_targets(1.0, 1.0, 0.01, 1e-6).unwrap();
    let problem = scaled.problem().unwrap();
    let x0 = vec![0.0; scaled.chain_len()];
    let eps = scaled.target_accuracy();

    let options = SolveOptions {
        target_accuracy: Some(eps),
        max_iters: Some(400_000),
        ..SolveOptions::default()
    };
    let trace = solve_nonstrong_qc(&problem, &x0, &options).unwrap();
    assert_eq!(
        trace.termination,
        Termination::TargetReached,
        "non-strong solver must reach {eps} on the chain, final gap {:?}",
        trace.final_gap
    );
    assert_envelope_clean(&trace, scaled.l_smooth(), scaled.gamma(), eps, "chain");
}

/// Shared prefix-structure assertions for runs started at the origin.
fn assert_prefix_discipline(prefix: &PrefixTrace, label: &str) {
    assert!(prefix.calls() > 0, "{label}: no oracle calls recorded");
    assert!(
        prefix.queries_respect_history(),
        "{label}: a query touched coordinates beyond the revealed span"
    );
    assert!(
        prefix.oracle_extends_by_at_most_one(),
        "{label}: a gradient extended the revealed span by more than one"
    );
    assert!(
        prefix.max_prefix_growth() <= 1,
        "{label}: revealed span grew by {} in one call",
        prefix.max_prefix_growth()
    );
}

/// Gradient evaluations spent when the gap first reached `eps`: the first
/// qualifying record, or the totals when only the final state qualifies.
fn grads_at_first_reach(trace: &SolverTrace, eps: f64) -> Option<u64> {
    for record in &trace.records {
        if let Some(gap) = record.f_gap {
            if gap <= eps {
                return Some(record.cum_grad_evals);
            }
        }
    }
    trace
        .final_gap
        .is_some_and(|gap| gap <= eps)
        .then_some(trace.total_grad_evals)
}

#[test]
fn hard_instance_blocks_progress_before_half_the_chain_is_revealed() {
    let scaled = HardInstanceScaled::from_targets(1.0, 1.0, 0.01, 2.5e-7).unwrap();
    assert_eq!(scaled.chain_len(), 2000, "targets must resolve to T = 2000");
    let objective = scaled.objective();
    let minimizer = scaled.minimizer();
    let eps = scaled.target_accuracy();
    let x0 = vec![0.0; scaled.chain_len()];
    let half_chain = scaled.chain_len().div_ceil(2) as u64;

    // Gradient descent: structure holds, and 30 000 iterations are not
    // enough to reach the target accuracy.
    let (gd_trace, gd_prefix) = run_with_prefix_instrumentation(&objective, |instrumented| {
        let problem = Problem::new(instrumented, scaled.l_smooth(), scaled.gamma(), 0.0)?
            .with_optimum(minimizer.clone(), 0.0)?;
        let options = SolveOptions {
            target_accuracy: Some(eps),
            max_iters: Some(30_000),
            ..SolveOptions::default()
        };
        solve_gd(&problem, &x0, &options)
    })
    .unwrap();
    assert_prefix_discipline(&gd_prefix, "gradient descent");
    assert!(
        gd_trace.final_gap.unwrap() > eps,
        "gradient descent should still be above {eps} after its budget, got {}",
        gd_trace.final_gap.unwrap()
    );
    for record in &gd_trace.records {
        assert!(
            record.f_gap.unwrap() > eps,
            "gradient descent dipped below {eps} at iteration {}",
            record.k
        );
    }

    // Non-strong accelerated run: reaches the target, but only after at
    // least half the chain has been queried.
    let (ns_trace, ns_prefix) = run_with_prefix_instrumentation(&objective, |instrumented| {
        let problem = Problem::new(instrumented, scaled.l_smooth(), scaled.gamma(), 0.0)?
            .with_radius(scaled.radius())?
            .with_optimum(minimizer.clone(), 0.0)?;
        let options = SolveOptions {
            target_accuracy: Some(eps),
            max_iters: Some(200_000),
            ..SolveOptions::default()
        };
        solve_nonstrong_qc(&problem, &x0, &options)
    })
    .unwrap();
    assert_prefix_discipline(&ns_prefix, "non-strong accelerated");
    assert_eq!(
        ns_trace.termination,
        Termination::TargetReached,
        "non-strong run must reach the target, final gap {:?}",
        ns_trace.final_gap
    );
    let ns_grads = grads_at_first_reach(&ns_trace, eps)
        .expect("target-reached run must have a qualifying state");
    assert!(
        ns_grads >= half_chain,
        "non-strong run reached {eps} after only {ns_grads} gradient calls; \
         the lower bound requires at least {half_chain}"
    );

    // Strong solver via the regularization reduction: same discipline and
    // the same information lower bound.
    let (reg_trace, reg_prefix) = run_with_prefix_instrumentation(&objective, |instrumented| {
        let problem = Problem::new(instrumented, scaled.l_smooth(), scaled.gamma(), 0.0)?
            .with_radius(scaled.radius())?
            .with_optimum(minimizer.clone(), 0.0)?;
        let options = SolveOptions {
            target_accuracy: Some(eps),
            max_iters: Some(60_000),
            ..SolveOptions::default()
        };
        solve_via_regularization(&problem, &x0, &options)
    })
    .unwrap();
    assert_prefix_discipline(&reg_prefix, "regularized strong");
    assert_eq!(
        reg_trace.termination,
        Termination::TargetReached,
        "regularized run must reach the target, final gap {:?}",
        reg_trace.final_gap
    );
    let reg_grads = grads_at_first_reach(&reg_trace, eps)
        .expect("target-reached run must have a qualifying state");
    assert!(
        reg_grads >= half_chain,
        "regularized run reached {eps} after only {reg_grads} gradient calls; \
         the lower bound requires at least {half_chain}"
    );
}
