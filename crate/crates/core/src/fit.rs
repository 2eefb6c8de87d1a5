//! Least-squares fits of `log(value)` against `log(p)`.

use serde::Serialize;

/// Values at or below this are treated as exact zeros and left out of fits.
pub const ZERO_FLOOR: f64 = 1e-12;

/// Minimum number of nonzero rows for a fit.
pub const MIN_FIT_ROWS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub rows_used: usize,
}

/// Unweighted least squares on `(ln p, ln value)`, skipping values below
/// [`ZERO_FLOOR`]. `None` when fewer than [`MIN_FIT_ROWS`] rows remain.
pub fn fit_log_log(points: &[(u64, f64)]) -> Option<LogLogFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, v)| v > ZERO_FLOOR)
        .map(|&(p, v)| ((p as f64).ln(), v.ln()))
        .collect();
    if logs.len() < MIN_FIT_ROWS {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|l| l.0).sum::<f64>() / n;
    let my = logs.iter().map(|l| l.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|l| (l.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|l| (l.0 - mx) * (l.1 - my)).sum();
    let slope = sxy / sxx;
    Some(LogLogFit {
        slope,
        intercept: my - slope * mx,
        rows_used: logs.len(),
    })
}
