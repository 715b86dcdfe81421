use serde::Serialize;

use super::kernel::KernelEstimate;

/// Descriptive shape check of a kernel estimate against a decreasing curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    /// Adjacent defined grid points where the estimate increases.
    pub violations: usize,
    pub max_violation: f64,
    /// Sup distance between the estimate and its decreasing isotonic fit.
    pub isotonic_distance: f64,
    /// The isotonic fit at the defined grid points, in grid order.
    pub isotonic_fit: Vec<f64>,
}

/// Pool-adjacent-violators fit of a nonincreasing sequence (unit weights).
pub fn isotonic_decreasing(values: &[f64]) -> Vec<f64> {
    // Blocks of (mean, size); merging keeps means nonincreasing.
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (m2, n2) = blocks[blocks.len() - 1];
            let (m1, n1) = blocks[blocks.len() - 2];
            if m1 >= m2 {
                break;
            }
            blocks.pop();
            let n = n1 + n2;
            *blocks.last_mut().unwrap() = ((m1 * n1 as f64 + m2 * n2 as f64) / n as f64, n);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, n)| std::iter::repeat_n(m, n))
        .collect()
}

/// Grid points without observations in the window are skipped.
pub fn monotonicity_diagnostic(est: &KernelEstimate) -> MonotonicityReport {
    let defined: Vec<f64> = est.values.iter().flatten().copied().collect();
    let mut violations = 0;
    let mut max_violation: f64 = 0.0;
    for w in defined.windows(2) {
        if w[1] > w[0] {
            violations += 1;
            max_violation = max_violation.max(w[1] - w[0]);
        }
    }
    let isotonic_fit = isotonic_decreasing(&defined);
    let isotonic_distance = defined
        .iter()
        .zip(&isotonic_fit)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    MonotonicityReport {
        violations,
        max_violation,
        isotonic_distance,
        isotonic_fit,
    }
}
