//! Structural invariance checks for quasar-convexity.
//!
//! Three consequences of the definition that make cheap desk checks:
//!
//! * **Scaling**: `x ↦ a·f(b·x)` (with `a > 0`, `b ≠ 0`) has the same
//!   weight as `f`, with reference point `x*/b` and modulus `a·b²·μ`. The
//!   per-sample feasible weight is invariant under the rescaling, sample by
//!   sample.
//! * **Trade-off**: a weight/modulus pair `(γ, μ)` implies the pair
//!   `(θγ, μ/θ)` for any `θ ∈ (0, 1]`, because the sampled inequality only
//!   tightens jointly.
//! * **Unimodal sections**: along an axis through the reference point of a
//!   chain or diagonal-quadratic instance, the directional derivative never
//!   points away from the reference point.

use crate::error::{Error, Result};
use crate::oracle::{CountingOracle, Objective};
use crate::vector;

use super::gamma::{feasible_gamma, DENOMINATOR_REL_TOL, INEQUALITY_REL_TOL};
use super::sample::SamplePlan;

/// Largest admissible per-sample weight mismatch under rescaling; relative
/// evaluation noise near cancellation points accounts for the slack.
pub const SCALING_MISMATCH_TOL: f64 = 1e-9;

/// Wrong-way slack for section slopes, scaled by `1 + |slope|`.
const SECTION_SLOPE_TOL: f64 = 1e-10;

/// Axes examined by the section check (capped for high-dimensional
/// instances; the leading axes carry the chain structure).
const SECTION_AXES_CAP: usize = 8;

/// The probe objective `x ↦ value_scale · f(input_scale · x)`.
struct ScaledProbe<'a> {
    inner: &'a dyn Objective,
    value_scale: f64,
    input_scale: f64,
}

impl Objective for ScaledProbe<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let y: Vec<f64> = x.iter().map(|&c| self.input_scale * c).collect();
        let value = self.inner.value_grad(&y, grad);
        let grad_scale = self.value_scale * self.input_scale;
        for g in grad.iter_mut() {
            *g *= grad_scale;
        }
        self.value_scale * value
    }
}

/// Checks that rescaling to `value_scale · f(input_scale · x)` leaves the
/// per-sample feasible weight unchanged on corresponding samples (`x` for
/// `f`, `x / input_scale` for the probe). Returns the largest observed
/// mismatch; anything above [`SCALING_MISMATCH_TOL`] indicates a defect.
pub fn check_scaling_invariance(
    objective: &dyn Objective,
    x_star: &[f64],
    mu: f64,
    value_scale: f64,
    input_scale: f64,
    plan: &SamplePlan,
) -> Result<f64> {
    plan.validate()?;
    if !(value_scale.is_finite() && value_scale > 0.0) {
        return Err(Error::InvalidConstant(format!(
            "value scale must be positive and finite, got {value_scale}"
        )));
    }
    if !(input_scale.is_finite() && input_scale != 0.0) {
        return Err(Error::InvalidConstant(format!(
            "input scale must be non-zero and finite, got {input_scale}"
        )));
    }
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidConstant(format!(
            "mu must be non-negative and finite, got {mu}"
        )));
    }

    let probe = ScaledProbe {
        inner: objective,
        value_scale,
        input_scale,
    };
    let base = CountingOracle::new(objective);
    let scaled = CountingOracle::new(&probe);

    let (f_star, _) = base.eval_alloc(x_star)?;
    let star_scaled: Vec<f64> = x_star.iter().map(|&c| c / input_scale).collect();
    let (g_star, _) = scaled.eval_alloc(&star_scaled)?;
    let mu_scaled = value_scale * input_scale * input_scale * mu;

    let mut rng = plan.rng();
    let dim = objective.dim();
    let mut max_mismatch = 0.0_f64;
    for _ in 0..plan.count {
        let x = plan.draw_point(&mut rng, dim);
        let (f_x, grad) = base.eval_alloc(&x)?;
        let n = slope_away(&grad, &x, x_star);
        let d = f_x - f_star + 0.5 * mu * vector::dist2(&x, x_star);
        let scale = 1.0_f64.max(f_x.abs()).max(f_star.abs());
        let zero_tol = DENOMINATOR_REL_TOL * scale;
        let gamma_base = feasible_gamma(n, d, zero_tol);

        let u: Vec<f64> = x.iter().map(|&c| c / input_scale).collect();
        let (g_u, grad_u) = scaled.eval_alloc(&u)?;
        let n_scaled = slope_away(&grad_u, &u, &star_scaled);
        let d_scaled = g_u - g_star + 0.5 * mu_scaled * vector::dist2(&u, &star_scaled);
        // Undo the known value scaling so both sides face identical
        // feasibility thresholds; the residual mismatch is then pure
        // evaluation noise.
        let gamma_probe = feasible_gamma(n_scaled / value_scale, d_scaled / value_scale, zero_tol);

        let mismatch = match (gamma_base, gamma_probe) {
            (Some(a), Some(b)) => (a - b).abs(),
            (None, None) => 0.0,
            // One side violated where the other did not: maximal mismatch.
            _ => 1.0,
        };
        max_mismatch = max_mismatch.max(mismatch);
    }
    Ok(max_mismatch)
}

/// Checks the weight/modulus trade-off: on samples where the `(gamma, mu)`
/// inequality holds, the `(theta·gamma, mu/theta)` inequality must hold as
/// well. Returns the failing samples as `(index, excess)` plus the number of
/// samples skipped because the base inequality itself failed there.
pub fn curvature_tradeoff_violations(
    objective: &dyn Objective,
    x_star: &[f64],
    gamma: f64,
    mu: f64,
    theta: f64,
    plan: &SamplePlan,
) -> Result<(Vec<(u64, f64)>, u64)> {
    plan.validate()?;
    if !(gamma.is_finite() && gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidConstant(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidConstant(format!(
            "mu must be non-negative and finite, got {mu}"
        )));
    }
    if !(theta.is_finite() && theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidConstant(format!(
            "theta must lie in (0, 1], got {theta}"
        )));
    }

    let oracle = CountingOracle::new(objective);
    let (f_star, _) = oracle.eval_alloc(x_star)?;
    let mut rng = plan.rng();
    let dim = objective.dim();

    let mut failures = Vec::new();
    let mut skipped = 0u64;
    for idx in 0..plan.count {
        let x = plan.draw_point(&mut rng, dim);
        let (f_x, grad) = oracle.eval_alloc(&x)?;
        let dist2 = vector::dist2(&x, x_star);
        let slope_in = -slope_away(&grad, &x, x_star);

        let base_excess = f_x + slope_in / gamma + 0.5 * mu * dist2 - f_star;
        let base_scale = 1.0_f64
            .max(f_x.abs())
            .max(f_star.abs())
            .max((slope_in / gamma).abs());
        if base_excess > INEQUALITY_REL_TOL * base_scale {
            skipped += 1;
            continue;
        }

        let traded_excess =
            f_x + slope_in / (theta * gamma) + 0.5 * (mu / theta) * dist2 - f_star;
        let traded_scale = 1.0_f64
            .max(f_x.abs())
            .max(f_star.abs())
            .max((slope_in / (theta * gamma)).abs())
            .max(0.5 * (mu / theta) * dist2);
        if traded_excess > INEQUALITY_REL_TOL * traded_scale {
            failures.push((idx, traded_excess));
        }
    }
    Ok((failures, skipped))
}

/// A grid point where a coordinate section's slope points away from the
/// reference point.
#[derive(Debug, Clone)]
pub struct SectionViolation {
    pub axis: usize,
    /// Signed offset from the reference point along the axis.
    pub offset: f64,
    /// Directional derivative at the offending point.
    pub slope: f64,
}

/// Scans coordinate sections through `x_star` on a symmetric grid and flags
/// points whose slope points away from the reference point, i.e. where
/// `f'(s)·sign(s) < 0` beyond slack. Meaningful for instances whose sections
/// are unimodal about the reference point, such as the chain instances and
/// diagonal quadratics. At most the first [`SECTION_AXES_CAP`] axes are
/// scanned.
pub fn unimodal_section_violations(
    objective: &dyn Objective,
    x_star: &[f64],
    half_width: f64,
    grid: usize,
) -> Result<Vec<SectionViolation>> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::InvalidConstant(format!(
            "section half-width must be positive and finite, got {half_width}"
        )));
    }
    if grid < 2 {
        return Err(Error::InvalidConfig(
            "section grid needs at least two points".into(),
        ));
    }
    let oracle = CountingOracle::new(objective);
    let dim = objective.dim();
    if x_star.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x_star.len(),
        });
    }

    let mut violations = Vec::new();
    let mut point = x_star.to_vec();
    for axis in 0..dim.min(SECTION_AXES_CAP) {
        for i in 0..grid {
            let s = -half_width + 2.0 * half_width * (i as f64) / ((grid - 1) as f64);
            if s.abs() < 1e-12 {
                continue;
            }
            point[axis] = x_star[axis] + s;
            let (_, grad) = oracle.eval_alloc(&point)?;
            let slope = grad[axis];
            if slope * s.signum() < -SECTION_SLOPE_TOL * (1.0 + slope.abs()) {
                violations.push(SectionViolation {
                    axis,
                    offset: s,
                    slope,
                });
            }
        }
        point[axis] = x_star[axis];
    }
    Ok(violations)
}

/// Combined outcome of the structural checks.
#[derive(Debug, Clone)]
pub struct StructuralReport {
    /// Largest per-sample weight mismatch over the scaling probes.
    pub scaling_max_mismatch: f64,
    /// Trade-off failures as `(sample index, excess)`, over all probed θ.
    pub tradeoff_violations: Vec<(u64, f64)>,
    /// Samples skipped by the trade-off check because the base inequality
    /// failed there (those belong to [`super::estimate_gamma`]'s domain).
    pub tradeoff_skipped: u64,
    /// Section grid points with a wrong-way slope.
    pub section_violations: Vec<SectionViolation>,
    /// Samples drawn per sampled check.
    pub samples_checked: u64,
}

impl StructuralReport {
    /// True when every structural check passed: scaling mismatch within
    /// [`SCALING_MISMATCH_TOL`] and no trade-off or section violations.
    pub fn passed(&self) -> bool {
        self.scaling_max_mismatch <= SCALING_MISMATCH_TOL
            && self.tradeoff_violations.is_empty()
            && self.section_violations.is_empty()
    }
}

/// Runs all structural checks with standard probes: rescalings
/// `(a, b) ∈ {(2, 3), (1/2, −2)}`, trade-off factors `θ ∈ {1/2, 1/10}`, and
/// sections on an 81-point grid of half-width 2.
pub fn check_structural_observations(
    objective: &dyn Objective,
    x_star: &[f64],
    gamma: f64,
    mu: f64,
    plan: &SamplePlan,
) -> Result<StructuralReport> {
    let mut scaling_max_mismatch = 0.0_f64;
    for (value_scale, input_scale) in [(2.0, 3.0), (0.5, -2.0)] {
        let mismatch =
            check_scaling_invariance(objective, x_star, mu, value_scale, input_scale, plan)?;
        scaling_max_mismatch = scaling_max_mismatch.max(mismatch);
    }

    let mut tradeoff_violations = Vec::new();
    let mut tradeoff_skipped = 0u64;
    for theta in [0.5, 0.1] {
        let (mut failures, skipped) =
            curvature_tradeoff_violations(objective, x_star, gamma, mu, theta, plan)?;
        tradeoff_violations.append(&mut failures);
        tradeoff_skipped += skipped;
    }

    let section_violations = unimodal_section_violations(objective, x_star, 2.0, 81)?;

    Ok(StructuralReport {
        scaling_max_mismatch,
        tradeoff_violations,
        tradeoff_skipped,
        section_violations,
        samples_checked: plan.count,
    })
}

/// `∇f(point)ᵀ(point − reference)`.
fn slope_away(grad: &[f64], point: &[f64], reference: &[f64]) -> f64 {
    grad.iter()
        .zip(point.iter().zip(reference))
        .map(|(g, (p, r))| g * (p - r))
        .sum()
}
