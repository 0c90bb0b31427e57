//! Least-squares estimation of scaling exponents from aggregate tables.

use super::run::AggRow;
use crate::{Error, Result};

/// Result of a log-log fit: mean ≈ exp(intercept) · n^slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_range: (u64, u64),
}

/// Plain ordinary least squares on (x, y) pairs; returns
/// (slope, intercept, r²). Needs at least two distinct x values.
pub fn linear_regression(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    assert!(pts.len() >= 2, "need at least two points");
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    assert!(sxx > 0.0, "need at least two distinct x values");
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r_squared)
}

/// Fit ln(mean) against ln(n) over the aggregate rows with n ≥ n_min.
/// Requires at least four such rows, all with strictly positive means.
pub fn fit_scaling(table: &[AggRow], n_min: u64) -> Result<FitResult> {
    let rows: Vec<&AggRow> = table.iter().filter(|r| r.n >= n_min).collect();
    if rows.len() < 4 {
        return Err(Error::Invalid(format!(
            "need at least 4 aggregate rows with n >= {n_min}, found {}",
            rows.len()
        )));
    }
    for r in &rows {
        if !(r.mean > 0.0) {
            return Err(Error::Invalid(format!(
                "non-positive mean {} at n = {} cannot be log-fitted",
                r.mean, r.n
            )));
        }
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), r.mean.ln()))
        .collect();
    let lo = rows.iter().map(|r| r.n).min().unwrap();
    let hi = rows.iter().map(|r| r.n).max().unwrap();
    if lo == hi {
        return Err(Error::Invalid(
            "all rows share one n; cannot fit a slope".into(),
        ));
    }
    let (slope, intercept, r_squared) = linear_regression(&pts);
    Ok(FitResult { slope, intercept, r_squared, n_range: (lo, hi) })
}
