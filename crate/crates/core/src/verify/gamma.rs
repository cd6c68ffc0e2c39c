//! Sampled certification of the quasar-convexity weight.
//!
//! For a declared reference point `x*` and modulus `μ`, each sample `x`
//! constrains the admissible weight through the defining inequality
//!
//! ```text
//! f(x*) ≥ f(x) + (1/γ)·∇f(x)ᵀ(x* − x) + (μ/2)·‖x* − x‖²
//! ⟺  γ·[f(x) − f(x*) + (μ/2)·‖x* − x‖²] ≤ ∇f(x)ᵀ(x − x*).
//! ```
//!
//! A certificate reports the largest weight in `(0, 1]` consistent with every
//! sample, the samples that bind it, and any samples no positive weight can
//! satisfy. Certification aborts if a sampled value undercuts the declared
//! reference value: the reference point is then simply not a minimizer.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::oracle::{CountingOracle, Objective};
use crate::vector;

use super::sample::SamplePlan;

/// Denominators within this relative tolerance of zero leave the sampled
/// weight unconstrained: such a sample carries no information about γ.
pub(super) const DENOMINATOR_REL_TOL: f64 = 1e-14;

/// A sampled value this far (relatively) below the reference value aborts
/// certification with [`Error::NotAMinimizer`].
const MINIMIZER_REL_TOL: f64 = 1e-12;

/// Per-sample weights within this relative band of the running minimum count
/// as binding and share the witness list.
const BINDING_REL_TOL: f64 = 1e-12;

/// Cap on stored witness and violation points; counts are still exact.
const STORED_POINT_CAP: usize = 8;

/// Feasibility slack for the sampled inequalities in the equivalence,
/// trade-off, and distance-bound checks, relative to the magnitudes
/// involved.
pub(super) const INEQUALITY_REL_TOL: f64 = 1e-9;

/// A sample point together with the number that made it notable: the largest
/// feasible weight for a binding sample, or the slack missing at weight one
/// for a violating sample.
#[derive(Debug, Clone)]
pub struct GammaWitness {
    pub point: Vec<f64>,
    pub margin: f64,
}

/// Result of a sampled quasar-convexity certification.
#[derive(Debug, Clone)]
pub struct QuasarCertificate {
    /// Largest weight in `(0, 1]` consistent with every non-violating sample.
    pub gamma_hat: f64,
    /// Up to [`STORED_POINT_CAP`] samples whose feasible weight equals
    /// `gamma_hat` (within a relative tie band of `1e-12`).
    pub witnesses: Vec<GammaWitness>,
    /// Up to [`STORED_POINT_CAP`] samples no positive weight satisfies.
    pub violations: Vec<GammaWitness>,
    /// Exact number of violating samples (the stored list is capped).
    pub violation_count: u64,
    /// Total number of samples assessed.
    pub sample_count: u64,
    /// Seed of the plan that produced the samples (0 for explicit points).
    pub seed: u64,
}

impl QuasarCertificate {
    /// True when every sample admitted a positive weight.
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }

    /// Combines two certificates over the union of their sample sets: the
    /// estimate is the minimum of the two, witness lists follow the binding
    /// side (merging on ties), and counts add. The seed of `self` is kept.
    pub fn merged(mut self, other: QuasarCertificate) -> QuasarCertificate {
        self.sample_count += other.sample_count;
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < STORED_POINT_CAP {
                self.violations.push(v);
            }
        }
        if other.gamma_hat < self.gamma_hat * (1.0 - BINDING_REL_TOL) {
            self.witnesses = other.witnesses;
        } else if other.gamma_hat <= self.gamma_hat * (1.0 + BINDING_REL_TOL) {
            for w in other.witnesses {
                if self.witnesses.len() < STORED_POINT_CAP {
                    self.witnesses.push(w);
                }
            }
        }
        self.gamma_hat = self.gamma_hat.min(other.gamma_hat);
        self
    }
}

/// Largest weight in `(0, 1]` satisfying `γ·d ≤ n`, if any.
///
/// `zero_tol` is the absolute magnitude below which the denominator `d`
/// counts as zero; the inequality then degenerates to `0 ≤ n` and constrains
/// nothing unless the slope term is genuinely negative.
pub(super) fn feasible_gamma(n: f64, d: f64, zero_tol: f64) -> Option<f64> {
    if d.abs() <= zero_tol {
        if n >= -zero_tol {
            Some(1.0)
        } else {
            None
        }
    } else if d > 0.0 {
        if n > 0.0 {
            Some((n / d).min(1.0).max(f64::MIN_POSITIVE))
        } else {
            None
        }
    } else {
        // Negative denominator: γ·d ≤ n relaxes as γ grows, so feasibility
        // of the largest weight is decided at γ = 1.
        if n >= d {
            Some(1.0)
        } else {
            None
        }
    }
}

/// Slope of the objective at `point` along the direction away from `x_star`,
/// `∇f(point)ᵀ(point − x_star)`.
fn outward_slope(grad: &[f64], point: &[f64], x_star: &[f64]) -> f64 {
    grad.iter()
        .zip(point.iter().zip(x_star))
        .map(|(g, (p, s))| g * (p - s))
        .sum()
}

fn check_modulus(mu: f64) -> Result<()> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidConstant(format!(
            "mu must be non-negative and finite, got {mu}"
        )));
    }
    Ok(())
}

fn check_weight(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidConstant(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    Ok(())
}

fn certify_points<I>(
    objective: &dyn Objective,
    x_star: &[f64],
    mu: f64,
    points: I,
    seed: u64,
) -> Result<QuasarCertificate>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    check_modulus(mu)?;
    let oracle = CountingOracle::new(objective);
    let (f_star, _) = oracle.eval_alloc(x_star)?;

    let mut gamma_hat = 1.0_f64;
    let mut witnesses: Vec<GammaWitness> = Vec::new();
    let mut violations: Vec<GammaWitness> = Vec::new();
    let mut violation_count = 0u64;
    let mut sample_count = 0u64;

    for point in points {
        sample_count += 1;
        let (f_x, grad) = oracle.eval_alloc(&point)?;
        let scale = 1.0_f64.max(f_x.abs()).max(f_star.abs());
        if f_x < f_star - MINIMIZER_REL_TOL * scale {
            return Err(Error::NotAMinimizer {
                sample_value: f_x,
                reference_value: f_star,
            });
        }
        let n = outward_slope(&grad, &point, x_star);
        let d = f_x - f_star + 0.5 * mu * vector::dist2(&point, x_star);
        match feasible_gamma(n, d, DENOMINATOR_REL_TOL * scale) {
            None => {
                violation_count += 1;
                if violations.len() < STORED_POINT_CAP {
                    violations.push(GammaWitness {
                        point,
                        margin: d - n,
                    });
                }
            }
            Some(g) => {
                if g < gamma_hat * (1.0 - BINDING_REL_TOL) {
                    gamma_hat = g;
                    witnesses.clear();
                    witnesses.push(GammaWitness { point, margin: g });
                } else if g <= gamma_hat * (1.0 + BINDING_REL_TOL) {
                    gamma_hat = gamma_hat.min(g);
                    if witnesses.len() < STORED_POINT_CAP {
                        witnesses.push(GammaWitness { point, margin: g });
                    }
                }
            }
        }
    }

    if sample_count == 0 {
        return Err(Error::InvalidConfig(
            "certification needs at least one sample point".into(),
        ));
    }
    Ok(QuasarCertificate {
        gamma_hat,
        witnesses,
        violations,
        violation_count,
        sample_count,
        seed,
    })
}

/// Certifies the quasar-convexity weight of `objective` with respect to
/// `x_star` and modulus `mu` over the plan's seeded uniform samples.
pub fn estimate_gamma(
    objective: &dyn Objective,
    x_star: &[f64],
    mu: f64,
    plan: &SamplePlan,
) -> Result<QuasarCertificate> {
    plan.validate()?;
    let mut rng = plan.rng();
    let dim = objective.dim();
    let points = (0..plan.count).map(|_| plan.draw_point(&mut rng, dim));
    certify_points(objective, x_star, mu, points, plan.seed)
}

/// Certifies the weight over caller-chosen probe points (seed recorded as 0).
///
/// Combine with a sampled certificate via [`QuasarCertificate::merged`] to
/// cover both generic and adversarial regions.
pub fn estimate_gamma_at(
    objective: &dyn Objective,
    x_star: &[f64],
    mu: f64,
    points: &[Vec<f64>],
) -> Result<QuasarCertificate> {
    certify_points(objective, x_star, mu, points.iter().cloned(), 0)
}

/// Adversarial probe points for chain instances: a settled head above the
/// transition region, a monotone ramp descending through it, and an exactly
/// zero tail. These are the shapes that bind the chain instances' declared
/// weight, which uniform sampling essentially never produces.
pub fn transition_patterns(dim: usize, count: u64, seed: u64) -> Vec<Vec<f64>> {
    if dim == 0 {
        return (0..count).map(|_| Vec::new()).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut x = vec![0.0; dim];
            let head = rng.gen_range(0..dim);
            let max_ramp = (dim - head).min(24);
            let ramp = rng.gen_range(1..=max_ramp);
            for value in x.iter_mut().take(head) {
                *value = rng.gen_range(0.9..1.4);
            }
            for (j, value) in x.iter_mut().skip(head).take(ramp).enumerate() {
                // Descend linearly from just under 0.9; the first untouched
                // coordinate (exact zero) completes the drop below 0.1.
                let frac = (j as f64 + 1.0) / (ramp as f64 + 1.0);
                *value = 0.9 - 0.8 * frac;
            }
            x
        })
        .collect()
}

/// Outcome of cross-checking the chord and tangent forms of the defining
/// inequality on shared samples.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub samples_checked: u64,
    /// Samples `(index, excess)` where the tangent form fails.
    pub tangent_violations: Vec<(u64, f64)>,
    /// Samples `(index, excess)` where the chord form fails at the drawn
    /// blend weight.
    pub chord_violations: Vec<(u64, f64)>,
    pub seed: u64,
}

impl EquivalenceReport {
    /// Both forms held on every sample.
    pub fn both_hold(&self) -> bool {
        self.tangent_violations.is_empty() && self.chord_violations.is_empty()
    }

    /// The sampled evidence is consistent with the two forms being
    /// equivalent: either both held everywhere or both were refuted. This is
    /// a sampled proxy — a violation of one form can evade a finite sample
    /// of the other — so it is meaningful on instances where failures are
    /// not needle-in-a-haystack events.
    pub fn consistent(&self) -> bool {
        self.tangent_violations.is_empty() == self.chord_violations.is_empty()
    }
}

/// Checks, on shared seeded samples, the tangent form
/// `f(x*) ≥ f(x) + (1/γ)∇f(x)ᵀ(x*−x) + (μ/2)‖x*−x‖²`
/// and the chord form
/// `f(tx* + (1−t)x) + t(1 − t/(2−γ))·(γμ/2)·‖x*−x‖² ≤ γt·f(x*) + (1−γt)·f(x)`
/// with `t` drawn uniformly from `[0, 1)` per sample.
///
/// For a function that is (γ, μ)-strongly quasar-convex with respect to
/// `x_star` the two forms are equivalent, so both lists come back empty;
/// for a function that is not, both checks are expected to find witnesses.
pub fn check_characterization_equivalence(
    objective: &dyn Objective,
    x_star: &[f64],
    gamma: f64,
    mu: f64,
    plan: &SamplePlan,
) -> Result<EquivalenceReport> {
    plan.validate()?;
    check_weight(gamma)?;
    check_modulus(mu)?;
    let oracle = CountingOracle::new(objective);
    let (f_star, _) = oracle.eval_alloc(x_star)?;
    let mut rng = plan.rng();
    let dim = objective.dim();

    let mut tangent_violations = Vec::new();
    let mut chord_violations = Vec::new();
    for idx in 0..plan.count {
        let x = plan.draw_point(&mut rng, dim);
        let t: f64 = rng.gen_range(0.0..1.0);
        let (f_x, grad) = oracle.eval_alloc(&x)?;
        let dist2 = vector::dist2(&x, x_star);
        let inward_slope = -outward_slope(&grad, &x, x_star);

        let tangent_rhs = f_x + inward_slope / gamma + 0.5 * mu * dist2;
        let tangent_scale = 1.0_f64
            .max(f_x.abs())
            .max(f_star.abs())
            .max((inward_slope / gamma).abs());
        if tangent_rhs - f_star > INEQUALITY_REL_TOL * tangent_scale {
            tangent_violations.push((idx, tangent_rhs - f_star));
        }

        let z: Vec<f64> = x
            .iter()
            .zip(x_star)
            .map(|(xi, si)| t * si + (1.0 - t) * xi)
            .collect();
        let (f_z, _) = oracle.eval_alloc(&z)?;
        let penalty = t * (1.0 - t / (2.0 - gamma)) * (0.5 * gamma * mu) * dist2;
        let lhs = f_z + penalty;
        let rhs = gamma * t * f_star + (1.0 - gamma * t) * f_x;
        let chord_scale = 1.0_f64.max(f_x.abs()).max(f_star.abs()).max(f_z.abs());
        if lhs - rhs > INEQUALITY_REL_TOL * chord_scale {
            chord_violations.push((idx, lhs - rhs));
        }
    }

    Ok(EquivalenceReport {
        samples_checked: plan.count,
        tangent_violations,
        chord_violations,
        seed: plan.seed,
    })
}

/// Checks the distance lower bound implied by strong quasar-convexity,
/// `f(x) − f(x*) ≥ γμ/(2(2−γ))·‖x*−x‖²`, on the plan's samples.
///
/// Returns the failing samples as `(index, shortfall)`.
pub fn distance_bound_violations(
    objective: &dyn Objective,
    x_star: &[f64],
    gamma: f64,
    mu: f64,
    plan: &SamplePlan,
) -> Result<Vec<(u64, f64)>> {
    plan.validate()?;
    check_weight(gamma)?;
    check_modulus(mu)?;
    let oracle = CountingOracle::new(objective);
    let (f_star, _) = oracle.eval_alloc(x_star)?;
    let coeff = gamma * mu / (2.0 * (2.0 - gamma));
    let mut rng = plan.rng();
    let dim = objective.dim();

    let mut failures = Vec::new();
    for idx in 0..plan.count {
        let x = plan.draw_point(&mut rng, dim);
        let (f_x, _) = oracle.eval_alloc(&x)?;
        let bound = coeff * vector::dist2(&x, x_star);
        let shortfall = bound - (f_x - f_star);
        let scale = 1.0_f64.max(f_x.abs()).max(f_star.abs()).max(bound.abs());
        if shortfall > INEQUALITY_REL_TOL * scale {
            failures.push((idx, shortfall));
        }
    }
    Ok(failures)
}
