//! Shared helpers for the acceptance target.

use std::f64::consts::PI;
use std::time::Duration;

/// Result of one acceptance criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }

    /// Fails when `elapsed` exceeds `budget`, keeping the original detail.
    pub fn within(self, elapsed: Duration, budget: Duration) -> Self {
        if elapsed <= budget {
            self
        } else {
            Self {
                passed: false,
                detail: format!("{}; over time budget {:.0?}", self.detail, budget),
            }
        }
    }
}

/// One report line: `criterion <id> (<name>): PASS|FAIL [<time>] <detail>`.
pub fn report_line(id: usize, name: &str, outcome: &Outcome, elapsed: Duration) -> String {
    let verdict = if outcome.passed { "PASS" } else { "FAIL" };
    format!("criterion {id} ({name}): {verdict} [{:.3}s] {}", elapsed.as_secs_f64(), outcome.detail)
}

/// Two-neighbour dispersion from the expanded square, independent of the
/// general momentum sum in the library.
pub fn expanded_two_neighbour(l1: f64, l2: f64, n: usize, k: i64) -> f64 {
    let t = 2.0 * PI * k as f64 / n as f64;
    (1.0 + l1 * l1 + l2 * l2 + 2.0 * l1 * (1.0 - l2) * t.cos() - 2.0 * l2 * (2.0 * t).cos()).sqrt()
}

/// Reference error probabilities for N = 12, K = 20, indexed `[p][M - 1]`
/// with `p` in {0.2, 0.3, 0.4, 0.5} and `M` in 1..=8.
pub const REFERENCE_ERROR_PROBABILITIES: [[f64; 8]; 4] = [
    [1.00, 0.64, 0.36, 0.22, 0.14, 0.14, 0.10, 0.09],
    [1.00, 0.43, 0.22, 0.11, 0.10, 0.10, 0.09, 0.05],
    [1.00, 0.51, 0.26, 0.18, 0.16, 0.10, 0.10, 0.09],
    [1.00, 0.67, 0.34, 0.23, 0.22, 0.18, 0.17, 0.13],
];

/// Number of adjacent increases in `row`.
pub fn inversions(row: &[f64]) -> usize {
    row.windows(2).filter(|w| w[1] > w[0]).count()
}
