//! Shared fixtures for the benchmarks.

use qbessel::QContext;

/// Parameter sets used throughout the benchmarks.
pub const CASES: [(f64, f64); 3] = [(0.5, 0.0), (0.8, 0.5), (0.95, 1.3)];

pub fn context(q: f64, alpha: f64) -> QContext {
    QContext::new(q, alpha).expect("benchmark parameters are valid")
}
