//! Empirical smoothness estimation.
//!
//! The estimate is the largest sampled gradient-difference ratio
//! `‖∇f(x) − ∇f(y)‖ / ‖x − y‖`: a lower bound on the true smoothness
//! constant that converges onto it as pairs accumulate. Alongside it, each
//! sampled point checks the standard descent consequence of `L`-smoothness,
//! `f(x − ∇f(x)/L) ≤ f(x) − ‖∇f(x)‖²/(2L)`, for the declared constant.

use crate::error::{Error, Result};
use crate::oracle::{CountingOracle, Objective};
use crate::vector;

use super::sample::SamplePlan;

/// Pairs closer than this are skipped: the ratio is numerically meaningless.
const MIN_PAIR_DISTANCE: f64 = 1e-9;

/// Relative slack for the descent-consequence check.
const DESCENT_REL_TOL: f64 = 1e-9;

/// Outcome of an empirical smoothness scan.
#[derive(Debug, Clone)]
pub struct SmoothnessReport {
    /// Largest sampled ratio `‖∇f(x) − ∇f(y)‖ / ‖x − y‖`; a lower bound on
    /// the true smoothness constant.
    pub l_hat: f64,
    /// Pairs whose ratio entered the estimate.
    pub pairs_checked: u64,
    /// Pairs skipped because the points nearly coincided.
    pub degenerate_pairs: u64,
    /// Samples `(index, excess)` where the declared constant's descent
    /// consequence failed — evidence the declared constant is understated.
    pub descent_violations: Vec<(u64, f64)>,
    pub seed: u64,
}

impl SmoothnessReport {
    /// True when the declared constant passed every descent check and
    /// dominates the empirical ratio up to `slack`.
    pub fn certifies(&self, declared_l: f64, slack: f64) -> bool {
        self.descent_violations.is_empty() && self.l_hat <= declared_l * (1.0 + slack)
    }
}

/// Scans seeded sample pairs for the largest gradient-difference ratio and
/// checks the declared constant's descent consequence at each pair's first
/// point.
pub fn smoothness_estimate(
    objective: &dyn Objective,
    declared_l: f64,
    plan: &SamplePlan,
) -> Result<SmoothnessReport> {
    plan.validate()?;
    if !(declared_l.is_finite() && declared_l > 0.0) {
        return Err(Error::InvalidConstant(format!(
            "declared smoothness constant must be positive and finite, got {declared_l}"
        )));
    }
    let oracle = CountingOracle::new(objective);
    let mut rng = plan.rng();
    let dim = objective.dim();

    let mut l_hat = 0.0_f64;
    let mut pairs_checked = 0u64;
    let mut degenerate_pairs = 0u64;
    let mut descent_violations = Vec::new();
    for idx in 0..plan.count {
        let x = plan.draw_point(&mut rng, dim);
        let y = plan.draw_point(&mut rng, dim);
        let (f_x, grad_x) = oracle.eval_alloc(&x)?;
        let (_, grad_y) = oracle.eval_alloc(&y)?;

        let distance = vector::dist2(&x, &y).sqrt();
        if distance <= MIN_PAIR_DISTANCE {
            degenerate_pairs += 1;
        } else {
            let ratio = vector::dist2(&grad_x, &grad_y).sqrt() / distance;
            l_hat = l_hat.max(ratio);
            pairs_checked += 1;
        }

        let step: Vec<f64> = x
            .iter()
            .zip(&grad_x)
            .map(|(xi, gi)| xi - gi / declared_l)
            .collect();
        let (f_step, _) = oracle.eval_alloc(&step)?;
        let guaranteed = f_x - vector::norm2(&grad_x) / (2.0 * declared_l);
        let excess = f_step - guaranteed;
        let scale = 1.0_f64.max(f_x.abs()).max(f_step.abs());
        if excess > DESCENT_REL_TOL * scale {
            descent_violations.push((idx, excess));
        }
    }

    Ok(SmoothnessReport {
        l_hat,
        pairs_checked,
        degenerate_pairs,
        descent_violations,
        seed: plan.seed,
    })
}
