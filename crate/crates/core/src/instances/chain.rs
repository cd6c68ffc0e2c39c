//! Chain-coupled quadratic and the unscaled hard instance built on it.
//!
//! The quadratic couples neighboring coordinates,
//! `(1/16)(x₁−1)² + (1/16)Σ(x_i−x_{i+1})²`, so information about the minimizer
//! (the all-ones vector) propagates along the chain one link per gradient
//! evaluation. The 1/16 weight keeps the quadratic strictly ½-smooth: its
//! Hessian is ⅛·B where B (the anchored second-difference matrix) has top
//! eigenvalue below 4, so the full objective stays below the declared
//! smoothness constant 1 with room for the bump term. Adding a separable bump term
//! ([`upsilon`](super::bump::upsilon)) per coordinate yields the unscaled hard
//! objective: 1-smooth, quasar-convex with a small curve parameter, minimized
//! at the all-ones vector with value 0, and expensive for any method that only
//! discovers coordinates through gradients.

use crate::error::{Error, Result};
use crate::instances::bump::{upsilon, upsilon_prime, BUMP_SMOOTHNESS};
use crate::oracle::Objective;
use crate::problem::Problem;

/// Value and gradient (written into `grad`) of the chain-coupled quadratic
/// `(1/16)(x₁−1)² + (1/16) Σ_{i<T} (x_i − x_{i+1})²`.
///
/// The gradient is assembled from exactly representable eighth-scaled
/// coordinate differences, so runs that keep tail coordinates at exact zero
/// see exact-zero gradient entries beyond the first inactive link.
///
/// # Panics
/// Panics if `x` is empty or `grad` has a different length than `x`.
pub fn chain_quadratic(x: &[f64], grad: &mut [f64]) -> f64 {
    assert!(!x.is_empty(), "chain must have at least one coordinate");
    assert_eq!(x.len(), grad.len(), "gradient buffer length mismatch");
    let t = x.len();
    let head = x[0] - 1.0;
    let mut value = 0.0625 * head * head;
    grad[0] = 0.125 * head;
    for i in 0..t - 1 {
        let link = x[i] - x[i + 1];
        value += 0.0625 * link * link;
        grad[i] += 0.125 * link;
        grad[i + 1] = -0.125 * link;
    }
    value
}

/// Convenience wrapper around [`chain_quadratic`] that allocates the gradient.
pub fn chain_quadratic_value_grad(x: &[f64]) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; x.len()];
    let value = chain_quadratic(x, &mut grad);
    (value, grad)
}

/// Parameters of the unscaled hard instance: chain length and the weight of
/// the per-coordinate bump term.
///
/// The certified construction requires `bump_weight ∈ (0, 1e-6]` and
/// `chain_len ≥ bump_weight^{-1/2}`; under those conditions the objective is
/// 1-smooth and quasar-convex with curve parameter
/// `1 / (100 · chain_len · √bump_weight)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardInstanceUnscaled {
    chain_len: usize,
    bump_weight: f64,
}

/// Upper bound on the certified bump weight.
pub const MAX_CERTIFIED_BUMP_WEIGHT: f64 = 1e-6;

impl HardInstanceUnscaled {
    /// Builds the instance, enforcing the certification preconditions
    /// `bump_weight ∈ (0, 1e-6]` and `chain_len ≥ bump_weight^{-1/2}`.
    pub fn new(chain_len: usize, bump_weight: f64) -> Result<Self> {
        let inst = Self::new_unchecked(chain_len, bump_weight)?;
        if bump_weight > MAX_CERTIFIED_BUMP_WEIGHT {
            return Err(Error::InvalidConfig(format!(
                "bump weight {bump_weight} exceeds the certified maximum \
                 {MAX_CERTIFIED_BUMP_WEIGHT}; use new_unchecked for exploratory runs"
            )));
        }
        if (chain_len as f64) < bump_weight.powf(-0.5) {
            return Err(Error::InvalidConfig(format!(
                "chain length {chain_len} is below bump_weight^(-1/2) = {}; the \
                 quasar-convexity certificate needs a longer chain",
                bump_weight.powf(-0.5)
            )));
        }
        Ok(inst)
    }

    /// Builds the instance checking only basic validity (positive finite
    /// weight, nonempty chain), skipping the certification range checks.
    ///
    /// The minimizer stays the all-ones vector with value 0 for any positive
    /// weight; what is lost outside the certified range is the guarantee on
    /// the declared curve parameter.
    pub fn new_unchecked(chain_len: usize, bump_weight: f64) -> Result<Self> {
        if chain_len == 0 {
            return Err(Error::InvalidConfig(
                "chain length must be at least 1".into(),
            ));
        }
        if !bump_weight.is_finite() || bump_weight <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "bump weight must be positive and finite, got {bump_weight}"
            )));
        }
        Ok(Self {
            chain_len,
            bump_weight,
        })
    }

    /// Chain length (the dimension).
    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    /// Weight multiplying the per-coordinate bump term.
    pub fn bump_weight(&self) -> f64 {
        self.bump_weight
    }

    /// Declared quasar-convexity curve parameter
    /// `1 / (100 · chain_len · √bump_weight)`, clamped into `(0, 1]`.
    pub fn gamma(&self) -> f64 {
        (1.0 / (100.0 * self.chain_len as f64 * self.bump_weight.sqrt())).min(1.0)
    }

    /// Smoothness constant of the objective. The quadratic part is ½-smooth
    /// and the bump sum is `180·bump_weight`-smooth; in the certified range
    /// the total stays below 1, and 1 is the declared constant.
    pub fn l_smooth(&self) -> f64 {
        (0.5 + BUMP_SMOOTHNESS * self.bump_weight).max(1.0)
    }

    /// Every vector whose tail `⌈chain_len/2⌉.. ` is zero has objective value
    /// at least this bound (`2 · chain_len · bump_weight`): reaching below it
    /// requires activating the second half of the chain.
    pub fn tail_zero_gap_bound(&self) -> f64 {
        2.0 * self.chain_len as f64 * self.bump_weight
    }

    /// The objective for this instance.
    pub fn objective(&self) -> UnscaledChainObjective {
        UnscaledChainObjective { params: *self }
    }

    /// Full problem description: objective plus declared constants and the
    /// analytic optimum (all-ones, value 0).
    pub fn problem(&self) -> Result<Problem<UnscaledChainObjective>> {
        Problem::new(self.objective(), self.l_smooth(), self.gamma(), 0.0)?
            .with_optimum(vec![1.0; self.chain_len], 0.0)
    }
}

/// Objective of the unscaled hard instance:
/// chain quadratic plus `bump_weight · Σ bump(x_i)`.
#[derive(Debug, Clone)]
pub struct UnscaledChainObjective {
    params: HardInstanceUnscaled,
}

impl UnscaledChainObjective {
    /// Instance parameters this objective was built from.
    pub fn params(&self) -> HardInstanceUnscaled {
        self.params
    }
}

impl Objective for UnscaledChainObjective {
    fn dim(&self) -> usize {
        self.params.chain_len
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let sigma = self.params.bump_weight;
        let mut value = chain_quadratic(x, grad);
        // Coordinates that are exactly zero are common (fresh tails of
        // zero-respecting runs); their bump value is a shared constant and
        // their bump slope is exactly zero, so skip the transcendentals.
        let bump_at_zero = upsilon(0.0);
        for (xi, gi) in x.iter().zip(grad.iter_mut()) {
            if *xi == 0.0 {
                value += sigma * bump_at_zero;
            } else {
                value += sigma * upsilon(*xi);
                *gi += sigma * upsilon_prime(*xi);
            }
        }
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::finite_diff_gradient;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadratic_vanishes_at_all_ones() {
        let x = vec![1.0; 7];
        let (value, grad) = chain_quadratic_value_grad(&x);
        assert_eq!(value, 0.0);
        assert!(grad.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn quadratic_hand_traced_small_cases() {
        // Two-coordinate chain at the origin: only the head term is active,
        // value (1/16)·1 and head gradient (1/8)·(0 − 1).
        let (value, grad) = chain_quadratic_value_grad(&[0.0, 0.0]);
        assert_eq!(value, 0.0625);
        assert_eq!(grad, vec![-0.125, 0.0]);
        // Single coordinate: only the head term, (1/16)(3−1)² = ¼.
        let (value, grad) = chain_quadratic_value_grad(&[3.0]);
        assert_eq!(value, 0.25);
        assert_eq!(grad, vec![0.25]);
    }

    #[test]
    fn quadratic_value_is_half_grad_dot_offset() {
        // q(x) = ½ ∇q(x)ᵀ(x − 1) for every x, because q is a quadratic
        // form in (x − 1) with no linear term.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x: Vec<f64> = (0..17).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let (value, grad) = chain_quadratic_value_grad(&x);
            let pairing: f64 = grad.iter().zip(&x).map(|(g, xi)| g * (xi - 1.0)).sum();
            assert!(
                (value - 0.5 * pairing).abs() <= 1e-12 * value.abs().max(1.0),
                "identity fails: q = {value}, half-pairing = {}",
                0.5 * pairing
            );
        }
    }

    #[test]
    fn quadratic_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..9).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (_, grad) = chain_quadratic_value_grad(&x);
        let fd = finite_diff_gradient(
            &crate::oracle::FnObjective::new(x.len(), |z: &[f64], g: &mut [f64]| {
                chain_quadratic(z, g)
            }),
            &x,
            1e-6,
        );
        for (i, (a, b)) in grad.iter().zip(&fd).enumerate() {
            assert!(
                (a - b).abs() < 1e-6,
                "coordinate {i}: analytic {a} vs finite difference {b}"
            );
        }
    }

    #[test]
    fn certified_constructor_enforces_ranges() {
        assert!(HardInstanceUnscaled::new(2_000, 1e-6).is_ok());
        // Weight too large for certification.
        assert!(HardInstanceUnscaled::new(2_000, 1e-3).is_err());
        // Chain too short for the weight.
        assert!(HardInstanceUnscaled::new(500, 1e-6).is_err());
        // Basic validity still enforced by the unchecked constructor.
        assert!(HardInstanceUnscaled::new_unchecked(0, 1e-6).is_err());
        assert!(HardInstanceUnscaled::new_unchecked(10, -1.0).is_err());
        assert!(HardInstanceUnscaled::new_unchecked(10, f64::NAN).is_err());
        // Exploratory parameters outside the certified range are accepted.
        assert!(HardInstanceUnscaled::new_unchecked(10, 1e-3).is_ok());
    }

    #[test]
    fn declared_curve_parameter() {
        let inst = HardInstanceUnscaled::new(1_000, 1e-6).unwrap();
        let expected = 1.0 / (100.0 * 1_000.0 * 1e-3);
        assert!((inst.gamma() - expected).abs() < 1e-15);
        assert!(inst.gamma() <= 0.01, "certified range forces gamma <= 0.01");
    }

    #[test]
    fn objective_minimum_and_tail_zero_bound() {
        let inst = HardInstanceUnscaled::new(1_000, 1e-6).unwrap();
        let obj = inst.objective();
        let mut grad = vec![0.0; 1_000];
        let at_ones = obj.value_grad(&vec![1.0; 1_000], &mut grad);
        assert_eq!(at_ones, 0.0, "value at the all-ones vector must be 0");
        assert!(grad.iter().all(|g| *g == 0.0), "gradient must vanish there");

        // A vector with the tail half zeroed cannot get below the bound.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let mut x: Vec<f64> = (0..1_000).map(|_| rng.gen_range(-1.0..2.0)).collect();
            for xi in x.iter_mut().skip(500) {
                *xi = 0.0;
            }
            let value = obj.value_grad(&x, &mut grad);
            assert!(
                value >= inst.tail_zero_gap_bound(),
                "tail-zero vector scored {value}, below bound {}",
                inst.tail_zero_gap_bound()
            );
        }
    }

    #[test]
    fn zero_tail_produces_exact_zero_gradient_past_frontier() {
        let inst = HardInstanceUnscaled::new(1_500, 1e-6).unwrap();
        let obj = inst.objective();
        let mut x = vec![0.0; 1_500];
        for (i, xi) in x.iter_mut().enumerate().take(40) {
            *xi = 0.3 + 0.01 * i as f64;
        }
        let mut grad = vec![0.0; 1_500];
        obj.value_grad(&x, &mut grad);
        // Support of x is {0..39}; the gradient may extend one link further.
        assert!(grad[40] != 0.0, "the frontier link should be active");
        for (i, g) in grad.iter().enumerate().skip(41) {
            assert_eq!(*g, 0.0, "gradient entry {i} must be exactly zero");
        }
    }

    #[test]
    fn gradient_matches_finite_differences_with_bumps() {
        let inst = HardInstanceUnscaled::new_unchecked(12, 1e-3).unwrap();
        let obj = inst.objective();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x: Vec<f64> = (0..12).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut grad = vec![0.0; 12];
        obj.value_grad(&x, &mut grad);
        let fd = finite_diff_gradient(&obj, &x, 1e-6);
        for (i, (a, b)) in grad.iter().zip(&fd).enumerate() {
            assert!(
                (a - b).abs() < 1e-5 * a.abs().max(1.0),
                "coordinate {i}: analytic {a} vs finite difference {b}"
            );
        }
    }
}
