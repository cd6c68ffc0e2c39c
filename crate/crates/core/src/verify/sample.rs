//! Seeded sampling plans shared by the certification checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A reproducible sampling plan: how many points to draw, from which seed,
/// and the per-coordinate range.
///
/// Coordinates are drawn i.i.d. uniform on `[low, high)`; the default range
/// is `[-2, 3)`, wide enough to straddle typical reference points and the
/// transition region of the chain instances. Two runs with equal plans see
/// identical samples, and because the generator is consumed in sample order,
/// a plan with a larger `count` but the same seed extends the smaller plan's
/// sample set rather than replacing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePlan {
    /// Number of samples to draw.
    pub count: u64,
    /// Seed of the counter-based generator.
    pub seed: u64,
    /// Inclusive lower bound of each coordinate.
    pub low: f64,
    /// Exclusive upper bound of each coordinate.
    pub high: f64,
}

impl SamplePlan {
    /// Plan with the default coordinate range `[-2, 3)`.
    pub fn new(count: u64, seed: u64) -> Self {
        Self {
            count,
            seed,
            low: -2.0,
            high: 3.0,
        }
    }

    /// Plan with an explicit coordinate range.
    pub fn with_range(count: u64, seed: u64, low: f64, high: f64) -> Result<Self> {
        let plan = Self {
            count,
            seed,
            low,
            high,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidConfig(
                "sampling plan needs at least one sample".into(),
            ));
        }
        if !(self.low.is_finite() && self.high.is_finite() && self.low < self.high) {
            return Err(Error::InvalidConfig(format!(
                "sampling range [{}, {}) is not a finite non-empty interval",
                self.low, self.high
            )));
        }
        Ok(())
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Draws the next point of the plan's stream.
    pub(crate) fn draw_point(&self, rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| rng.gen_range(self.low..self.high)).collect()
    }
}
