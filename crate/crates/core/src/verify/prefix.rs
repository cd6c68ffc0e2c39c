//! Zero-chain oracle instrumentation.
//!
//! The lower-bound construction rests on a structural fact: on a chain
//! instance, the gradient's nonzero prefix extends the query's by at most
//! one, so any method whose queries stay inside the span revealed by earlier
//! gradients uncovers at most one new coordinate per oracle call. The
//! wrapper here records both prefixes per call so that property can be
//! checked on real solver runs — and refuted for methods that peek ahead.
//!
//! Two prefix measures coexist. [`nonzero_prefix`] ignores magnitudes at or
//! below [`PREFIX_ZERO_TOL`], a lenient convention for inspecting external
//! data that may carry rounding noise. The recorded traces instead use
//! [`exact_nonzero_prefix`]: the library's solvers form iterates purely from
//! linear combinations of past queries and gradients, so coordinates outside
//! the revealed span stay exactly zero, the zero-chain invariants are exact
//! statements, and thresholding would only misclassify legitimately revealed
//! coordinates whose values still sit below the cutoff.

use std::sync::Mutex;

use crate::error::Result;
use crate::oracle::Objective;

/// Coordinates with magnitude at or below this threshold count as zero for
/// the lenient prefix measure [`nonzero_prefix`].
pub const PREFIX_ZERO_TOL: f64 = 1e-14;

/// Nonzero-prefix length of a vector under the lenient convention: one past
/// the highest index whose magnitude exceeds [`PREFIX_ZERO_TOL`], or 0 for a
/// vector with no such coordinate. Suited to externally produced vectors
/// where rounding noise should not count as a revealed coordinate.
pub fn nonzero_prefix(x: &[f64]) -> usize {
    x.iter()
        .rposition(|v| v.abs() > PREFIX_ZERO_TOL)
        .map_or(0, |i| i + 1)
}

/// Nonzero-prefix length of a vector counting every coordinate that is not
/// exactly zero. This is the measure used in recorded traces: zero-chain
/// certification is an exact property, and revealed coordinates can carry
/// arbitrarily small values long before they grow past any fixed threshold.
pub fn exact_nonzero_prefix(x: &[f64]) -> usize {
    x.iter().rposition(|v| *v != 0.0).map_or(0, |i| i + 1)
}

/// Prefix lengths observed at one oracle call, measured with
/// [`exact_nonzero_prefix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrefixRecord {
    /// Exact nonzero prefix of the query point.
    pub query: usize,
    /// Exact nonzero prefix of the returned gradient.
    pub gradient: usize,
}

/// Chronological per-call prefix record of an instrumented run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixTrace {
    pub records: Vec<PrefixRecord>,
}

impl PrefixTrace {
    /// Number of oracle calls recorded.
    pub fn calls(&self) -> usize {
        self.records.len()
    }

    /// Largest gradient prefix seen so far (0 before any call).
    pub fn high_water(&self) -> usize {
        self.records.iter().map(|r| r.gradient).max().unwrap_or(0)
    }

    /// Largest single-call increase of the gradient-prefix high-water mark.
    /// At most 1 for a zero-respecting method on a zero-chain started at the
    /// origin.
    pub fn max_prefix_growth(&self) -> usize {
        let mut high_water = 0usize;
        let mut max_growth = 0usize;
        for record in &self.records {
            max_growth = max_growth.max(record.gradient.saturating_sub(high_water));
            high_water = high_water.max(record.gradient);
        }
        max_growth
    }

    /// Indices of calls whose query prefix exceeds every gradient prefix
    /// returned before them — queries that reveal coordinates the oracle has
    /// not yet disclosed. Empty for a zero-respecting method started at the
    /// origin.
    pub fn dense_query_calls(&self) -> Vec<usize> {
        let mut high_water = 0usize;
        let mut dense = Vec::new();
        for (idx, record) in self.records.iter().enumerate() {
            if record.query > high_water {
                dense.push(idx);
            }
            high_water = high_water.max(record.gradient);
        }
        dense
    }

    /// True when every query stayed inside the span revealed by earlier
    /// gradients.
    pub fn queries_respect_history(&self) -> bool {
        self.dense_query_calls().is_empty()
    }

    /// True when each returned gradient extended its own query's prefix by
    /// at most one — the defining oracle-side property of a zero-chain.
    pub fn oracle_extends_by_at_most_one(&self) -> bool {
        self.records.iter().all(|r| r.gradient <= r.query + 1)
    }
}

/// Objective wrapper that records the exact nonzero prefixes of every query
/// and its returned gradient, in call order.
pub struct PrefixRecordingObjective<'a> {
    inner: &'a dyn Objective,
    records: Mutex<Vec<PrefixRecord>>,
}

impl<'a> PrefixRecordingObjective<'a> {
    pub fn new(inner: &'a dyn Objective) -> Self {
        Self {
            inner,
            records: Mutex::new(Vec::new()),
        }
    }

    /// Snapshot of the records so far.
    pub fn trace(&self) -> PrefixTrace {
        PrefixTrace {
            records: self.records.lock().expect("prefix records poisoned").clone(),
        }
    }
}

impl Objective for PrefixRecordingObjective<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let query = exact_nonzero_prefix(x);
        let value = self.inner.value_grad(x, grad);
        let gradient = exact_nonzero_prefix(grad);
        self.records
            .lock()
            .expect("prefix records poisoned")
            .push(PrefixRecord { query, gradient });
        value
    }
}

/// Runs a solver (or any oracle-driven procedure) against an instrumented
/// view of `objective` and returns its result together with the per-call
/// prefix trace. The closure receives the instrumented objective and should
/// build its problem description around it; start at the origin when
/// checking zero-respecting behaviour.
pub fn run_with_prefix_instrumentation<T>(
    objective: &dyn Objective,
    run: impl FnOnce(&dyn Objective) -> Result<T>,
) -> Result<(T, PrefixTrace)> {
    let wrapper = PrefixRecordingObjective::new(objective);
    let outcome = run(&wrapper)?;
    Ok((outcome, wrapper.trace()))
}
