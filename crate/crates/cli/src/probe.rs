//! Standalone line-search probe: runs one bisection search over a segment
//! on a chosen instance and reports the outcome next to its certified
//! evaluation bound and descent-condition residual.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use quasar_opt::linesearch::{
    alpha_condition_residual, binary_line_search, eval_bound, LineSearchParams,
};
use quasar_opt::oracle::CountingOracle;
use quasar_opt::vector;

use crate::instance::{self, InstanceSpec, SpecError};
use crate::run::CliError;

/// A validated probe request.
#[derive(Debug, Clone)]
pub struct ProbeSpec {
    pub instance: InstanceSpec,
    /// Quadratic relaxation weight `b >= 0`.
    pub b: f64,
    /// Value-difference weight `c >= 0`.
    pub c: f64,
    /// Additive slack `eps_tilde >= 0`.
    pub eps_tilde: f64,
    /// Seeds the segment endpoints when they are not given explicitly.
    pub seed: u64,
    /// Explicit gradient-step endpoint (the `alpha = 1` end).
    pub x: Option<Vec<f64>>,
    /// Explicit momentum endpoint (the `alpha = 0` end).
    pub v: Option<Vec<f64>>,
}

fn require_non_negative(field: &str, value: f64) -> Result<(), SpecError> {
    if !(value.is_finite() && value >= 0.0) {
        return Err(SpecError::new(
            field,
            format!("must be non-negative and finite, got {value}"),
        ));
    }
    Ok(())
}

impl ProbeSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        instance::validate_spec(&self.instance)?;
        require_non_negative("b", self.b)?;
        require_non_negative("c", self.c)?;
        require_non_negative("eps-tilde", self.eps_tilde)?;
        Ok(())
    }
}

/// Probe outcome: the chosen weight and exit branch, the evaluations spent
/// against the certified bound, and the descent-condition residual with its
/// acceptance tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub alpha: f64,
    pub branch: String,
    pub evals: u64,
    pub loop_iters: u64,
    /// Certified evaluation bound; `null`/absent cap when no bound exists
    /// (`b = 0` and `eps_tilde = 0`).
    pub eval_bound: Option<u64>,
    /// Violation margin of the descent condition at the returned point;
    /// certified outcomes are non-positive up to `residual_tolerance`.
    pub residual: f64,
    pub residual_tolerance: f64,
    pub dir_norm2: f64,
    pub value_at_alpha: f64,
    pub slope_at_alpha: f64,
}

impl ProbeReport {
    /// Plain-text rendering, one `key = value` line each.
    pub fn render_text(&self) -> String {
        let bound = self
            .eval_bound
            .map_or_else(|| "none".to_string(), |b| b.to_string());
        format!(
            "alpha = {}\nbranch = {}\nevals = {}\nloop_iters = {}\neval_bound = {bound}\n\
             residual = {:e}\nresidual_tolerance = {:e}\ndir_norm2 = {:e}\n",
            self.alpha, self.branch, self.evals, self.loop_iters, self.residual,
            self.residual_tolerance, self.dir_norm2
        )
    }
}

fn resolve_endpoint(
    field: &str,
    explicit: &Option<Vec<f64>>,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, SpecError> {
    match explicit {
        Some(point) => {
            if point.len() != dim {
                return Err(SpecError::new(
                    field,
                    format!("expected {dim} coordinates (the instance dimension), got {}", point.len()),
                ));
            }
            if let Some(bad) = point.iter().find(|c| !c.is_finite()) {
                return Err(SpecError::new(field, format!("coordinates must be finite, got {bad}")));
            }
            Ok(point.clone())
        }
        None => Ok((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()),
    }
}

/// Builds the instance, resolves the segment, runs the search, and scores
/// the outcome. The residual's `g(1)` reference is re-evaluated outside the
/// counted run, so the reported `evals` are exactly the search's own.
pub fn execute(spec: &ProbeSpec) -> Result<ProbeReport, CliError> {
    spec.validate()?;
    let built = instance::build(&spec.instance, spec.seed, None)?;
    let dim = built.objective.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let x = resolve_endpoint("x", &spec.x, dim, &mut rng)?;
    let v = resolve_endpoint("v", &spec.v, dim, &mut rng)?;

    let objective = built.objective;
    let oracle = CountingOracle::new(&*objective);
    let params = LineSearchParams {
        b: spec.b,
        c: spec.c,
        eps_tilde: spec.eps_tilde,
        l_smooth: built.l_smooth,
        x: &x,
        v: &v,
    };
    let outcome = binary_line_search(&oracle, &params, None)?;

    let dir_norm2 = vector::dist2(&x, &v);
    let value_at_one = if outcome.alpha == 1.0 {
        outcome.value_at_alpha
    } else {
        let probe_oracle = CountingOracle::new(&*objective);
        probe_oracle.eval_alloc(&x)?.0
    };
    let residual = alpha_condition_residual(
        outcome.alpha,
        outcome.value_at_alpha,
        outcome.slope_at_alpha,
        value_at_one,
        spec.b * dir_norm2,
        spec.c,
        spec.eps_tilde,
    );
    Ok(ProbeReport {
        alpha: outcome.alpha,
        branch: outcome.branch.as_str().to_string(),
        evals: outcome.evals,
        loop_iters: outcome.loop_iters,
        eval_bound: eval_bound(spec.b, spec.c, spec.eps_tilde, built.l_smooth, dir_norm2),
        residual,
        residual_tolerance: 1e-12 * 1.0_f64.max(value_at_one.abs()),
        dir_norm2,
        value_at_alpha: outcome.value_at_alpha,
        slope_at_alpha: outcome.slope_at_alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::SpectrumKind;

    fn quadratic_spec() -> InstanceSpec {
        InstanceSpec::Quadratic {
            n: 4,
            mu: 0.1,
            l: 1.0,
            spectrum: SpectrumKind::Linear,
            xstar_seed: 5,
        }
    }

    #[test]
    fn coincident_endpoints_choose_one_in_at_most_one_eval() {
        let point = vec![0.4, -0.2, 0.7, 0.1];
        let spec = ProbeSpec {
            instance: quadratic_spec(),
            b: 0.05,
            c: 0.5,
            eps_tilde: 0.0,
            seed: 0,
            x: Some(point.clone()),
            v: Some(point),
        };
        let report = execute(&spec).unwrap();
        assert_eq!(report.alpha, 1.0);
        assert!(report.evals <= 1, "evals = {}", report.evals);
        assert!(report.residual <= report.residual_tolerance);
    }

    #[test]
    fn random_segments_stay_within_bound_and_residual() {
        for seed in 0..50 {
            let spec = ProbeSpec {
                instance: quadratic_spec(),
                b: 0.02,
                c: 1.5,
                eps_tilde: 0.0,
                seed,
                x: None,
                v: None,
            };
            let report = execute(&spec).unwrap();
            assert_ne!(report.branch, "guard", "seed {seed}");
            if let Some(bound) = report.eval_bound {
                assert!(report.evals <= bound, "seed {seed}: {} > {bound}", report.evals);
            }
            assert!(
                report.residual <= report.residual_tolerance,
                "seed {seed}: residual {} tolerance {}",
                report.residual,
                report.residual_tolerance
            );
        }
    }

    #[test]
    fn endpoint_dimension_mismatch_names_the_field() {
        let spec = ProbeSpec {
            instance: quadratic_spec(),
            b: 0.0,
            c: 0.0,
            eps_tilde: 0.0,
            seed: 0,
            x: Some(vec![1.0, 2.0]),
            v: None,
        };
        let err = execute(&spec).unwrap_err();
        match err {
            CliError::Spec(e) => assert_eq!(e.field, "x"),
            other => panic!("expected a spec error, got {other}"),
        }
    }

    #[test]
    fn zero_slack_zero_weight_bound_uses_curvature_operand() {
        // With eps_tilde = 0 the distance operand is unavailable; the bound
        // must come from the curvature ratio alone and be finite for b > 0.
        let spec = ProbeSpec {
            instance: quadratic_spec(),
            b: 0.25,
            c: 1.0,
            eps_tilde: 0.0,
            seed: 3,
            x: None,
            v: None,
        };
        let report = execute(&spec).unwrap();
        let expected = eval_bound(0.25, 1.0, 0.0, 1.0, report.dir_norm2).unwrap();
        assert_eq!(report.eval_bound, Some(expected));
        // The operand is (L/b)^3, independent of the segment length.
        let expected_other_segment = eval_bound(0.25, 1.0, 0.0, 1.0, 123.456).unwrap();
        assert_eq!(expected, expected_other_segment);
    }
}
