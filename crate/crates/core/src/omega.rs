//! Step-weight sequence for the non-strong accelerated solver.
//!
//! Starting from the seed value 1, each term is
//! `w ↦ ½ w (√(w²+4) − w)`, producing a strictly decreasing sequence in
//! (0, 1) that behaves like `Θ(1/k)`: it is sandwiched between `1/(k+2)` and
//! `4/(k+6)` and satisfies the defect identity `w_{k+1}² = (1 − w_{k+1}) w_k²`.
//! The solver divides its momentum step size by these weights, which is what
//! produces the accelerated `1/k²` decay of the error bound.
//!
//! Numerically benign: `√(w²+4) − w ≥ 1` for `w ∈ (0, 1]`, so the
//! subtraction never cancels.

/// Applies the recurrence once: `½ w (√(w²+4) − w)`.
pub fn step_weight_next(w: f64) -> f64 {
    0.5 * w * ((w * w + 4.0).sqrt() - w)
}

/// The k-th step weight, for `k ≥ −1`; `omega(-1) = 1` is the seed.
///
/// Runs the recurrence from the seed in `O(k+1)` time; use [`OmegaSequence`]
/// when consuming many consecutive terms.
pub fn omega(k: i64) -> f64 {
    assert!(k >= -1, "step-weight index starts at -1, got {k}");
    let mut w = 1.0;
    for _ in 0..=k {
        w = step_weight_next(w);
    }
    w
}

/// Iterator over the step weights `omega(0), omega(1), …`.
#[derive(Debug, Clone)]
pub struct OmegaSequence {
    prev: f64,
    next_index: u64,
}

impl OmegaSequence {
    /// Starts the sequence at the seed, so the first `next()` yields
    /// `omega(0)`.
    pub fn new() -> Self {
        Self {
            prev: 1.0,
            next_index: 0,
        }
    }

    /// The most recently yielded weight (the seed value 1 before any
    /// `next()` call).
    pub fn last_yielded(&self) -> f64 {
        self.prev
    }

    /// Index the next `next()` call will produce.
    pub fn next_index(&self) -> u64 {
        self.next_index
    }
}

impl Default for OmegaSequence {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for OmegaSequence {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.prev = step_weight_next(self.prev);
        self.next_index += 1;
        Some(self.prev)
    }
}
