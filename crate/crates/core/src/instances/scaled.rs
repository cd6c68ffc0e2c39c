//! Scaled hard instance: the chain objective dilated to prescribed smoothness,
//! initial distance, curve parameter, and accuracy threshold.
//!
//! Starting from the unscaled chain objective `f̄` ([`HardInstanceUnscaled`]),
//! the scaled objective is `x ↦ (L R²/T) · f̄(x √T / R)`, which is `L`-smooth,
//! keeps the same curve parameter, moves the minimizer to `(R/√T)·(all ones)`
//! at distance exactly `R` from the origin, and is calibrated so that any
//! point whose tail half is still zero has value gap above the accuracy
//! threshold. Chain length and bump weight are derived from the targets.

use crate::error::{Error, Result};
use crate::instances::chain::{HardInstanceUnscaled, UnscaledChainObjective};
use crate::oracle::Objective;
use crate::problem::Problem;

/// Hard cap on derived chain lengths, to fail fast on accuracy targets that
/// would ask for multi-gigabyte iterates. Front ends may apply stricter caps.
pub const MAX_CHAIN_LEN: usize = 50_000_000;

/// Parameters of the scaled hard instance. Construct with
/// [`HardInstanceScaled::from_targets`]; chain length and bump weight are
/// derived, not chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardInstanceScaled {
    l_smooth: f64,
    radius: f64,
    gamma: f64,
    target_accuracy: f64,
    unscaled: HardInstanceUnscaled,
}

impl HardInstanceScaled {
    /// Builds the instance from its targets, enforcing the certification
    /// preconditions `gamma ∈ (0, 1e-2]` and `√l_smooth · radius / √accuracy
    /// ≥ 1e3`. Under these, the derived chain satisfies the unscaled
    /// instance's own preconditions and the declared curve parameter is
    /// certified.
    pub fn from_targets(
        l_smooth: f64,
        radius: f64,
        gamma: f64,
        target_accuracy: f64,
    ) -> Result<Self> {
        if gamma > 1e-2 {
            return Err(Error::InvalidConfig(format!(
                "curve parameter {gamma} exceeds the certified maximum 1e-2; \
                 use from_targets_unchecked for exploratory runs"
            )));
        }
        let hardness = Self::hardness(l_smooth, radius, target_accuracy)?;
        if hardness < 1e3 {
            return Err(Error::InvalidConfig(format!(
                "sqrt(L)·R/sqrt(accuracy) = {hardness} is below the certified \
                 minimum 1e3; tighten the accuracy or enlarge the radius"
            )));
        }
        Self::build(l_smooth, radius, gamma, target_accuracy, true)
    }

    /// Builds the instance with the certification range checks relaxed:
    /// only basic validity (positive finite targets, `gamma ∈ (0, 1]`,
    /// derived chain length within [`MAX_CHAIN_LEN`]) is enforced.
    ///
    /// The minimizer and value 0 remain exact for any such parameters; what
    /// is lost is the certificate that the declared curve parameter holds.
    pub fn from_targets_unchecked(
        l_smooth: f64,
        radius: f64,
        gamma: f64,
        target_accuracy: f64,
    ) -> Result<Self> {
        Self::hardness(l_smooth, radius, target_accuracy)?;
        Self::build(l_smooth, radius, gamma, target_accuracy, false)
    }

    fn hardness(l_smooth: f64, radius: f64, target_accuracy: f64) -> Result<f64> {
        for (name, v) in [
            ("smoothness", l_smooth),
            ("radius", radius),
            ("target accuracy", target_accuracy),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(l_smooth.sqrt() * radius / target_accuracy.sqrt())
    }

    fn build(
        l_smooth: f64,
        radius: f64,
        gamma: f64,
        target_accuracy: f64,
        certified: bool,
    ) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 || gamma > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "curve parameter must lie in (0, 1], got {gamma}"
            )));
        }
        let hardness = l_smooth.sqrt() * radius / target_accuracy.sqrt();
        let chain_real = (1e-2 * hardness / gamma).ceil();
        if !(1.0..=MAX_CHAIN_LEN as f64).contains(&chain_real) {
            return Err(Error::InvalidConfig(format!(
                "derived chain length {chain_real} outside [1, {MAX_CHAIN_LEN}]"
            )));
        }
        let chain_len = chain_real as usize;
        let bump_weight = 1.0 / (1e4 * (chain_len as f64 * gamma).powi(2));
        let unscaled = if certified {
            HardInstanceUnscaled::new(chain_len, bump_weight)?
        } else {
            HardInstanceUnscaled::new_unchecked(chain_len, bump_weight)?
        };
        Ok(Self {
            l_smooth,
            radius,
            gamma,
            target_accuracy,
            unscaled,
        })
    }

    /// Declared smoothness constant.
    pub fn l_smooth(&self) -> f64 {
        self.l_smooth
    }

    /// Distance from the origin to the minimizer.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Declared quasar-convexity curve parameter.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Accuracy threshold the instance was calibrated against.
    pub fn target_accuracy(&self) -> f64 {
        self.target_accuracy
    }

    /// Derived chain length (the dimension).
    pub fn chain_len(&self) -> usize {
        self.unscaled.chain_len()
    }

    /// The underlying unscaled instance.
    pub fn unscaled(&self) -> HardInstanceUnscaled {
        self.unscaled
    }

    /// The minimizer `(radius/√chain_len) · (all ones)`; its norm is exactly
    /// the radius up to rounding.
    pub fn minimizer(&self) -> Vec<f64> {
        let v = self.radius / (self.chain_len() as f64).sqrt();
        vec![v; self.chain_len()]
    }

    /// Every vector whose tail `⌈chain_len/2⌉..` is zero has value at least
    /// `2·L·R²·bump_weight`; in the certified range this is above the
    /// accuracy threshold, which is what makes the instance hard.
    pub fn tail_zero_gap_bound(&self) -> f64 {
        2.0 * self.l_smooth * self.radius * self.radius * self.unscaled.bump_weight()
    }

    /// The objective for this instance.
    pub fn objective(&self) -> ScaledChainObjective {
        let t = self.chain_len() as f64;
        ScaledChainObjective {
            inner: self.unscaled.objective(),
            input_scale: t.sqrt() / self.radius,
            value_scale: self.l_smooth * self.radius * self.radius / t,
            grad_scale: self.l_smooth * self.radius / t.sqrt(),
            params: *self,
        }
    }

    /// Full problem description: objective, declared constants, radius, and
    /// the analytic optimum.
    pub fn problem(&self) -> Result<Problem<ScaledChainObjective>> {
        Problem::new(self.objective(), self.l_smooth, self.gamma, 0.0)?
            .with_radius(self.radius)?
            .with_optimum(self.minimizer(), 0.0)
    }
}

/// Objective of the scaled hard instance: input dilated onto the unscaled
/// chain, value and gradient scaled back.
#[derive(Debug, Clone)]
pub struct ScaledChainObjective {
    inner: UnscaledChainObjective,
    input_scale: f64,
    value_scale: f64,
    grad_scale: f64,
    params: HardInstanceScaled,
}

impl ScaledChainObjective {
    /// Instance parameters this objective was built from.
    pub fn params(&self) -> HardInstanceScaled {
        self.params
    }
}

impl Objective for ScaledChainObjective {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        // Exact zeros stay exact zeros under scaling, so zero-tail inputs
        // still see exact-zero gradient entries past the frontier.
        let z: Vec<f64> = x.iter().map(|xi| xi * self.input_scale).collect();
        let value = self.inner.value_grad(&z, grad);
        for g in grad.iter_mut() {
            *g *= self.grad_scale;
        }
        self.value_scale * value
    }
}
