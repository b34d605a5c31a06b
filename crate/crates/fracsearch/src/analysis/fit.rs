//! Power-law fitting by ordinary least squares in log-log space.

use crate::notation::format_last_digit;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("power-law fit needs at least 2 points in range (got {0})")]
    TooFewPoints(usize),
    #[error("non-positive sample (x = {x}, y = {y}) cannot be log-transformed")]
    NonPositive { x: f64, y: f64 },
    #[error("fit exponent {0} is non-negative; the return probability must decay")]
    NonDecaying(f64),
}

/// y = prefactor * x^exponent with OLS standard errors from log-log space.
#[derive(Debug, Clone, Serialize)]
pub struct PowerLawFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub stderr_exponent: f64,
    pub stderr_prefactor: f64,
    pub sample_count: usize,
    pub x_range: (f64, f64),
    pub exponent_notation: String,
    pub prefactor_notation: String,
}

/// OLS on (ln x, ln y): exponent = slope, prefactor = exp(intercept).
/// Standard errors use the usual residual-variance formulas; with exactly two
/// points the residual is zero and both errors are zero by convention.
pub fn power_law_fit(
    points: &[(f64, f64)],
    range: Option<(f64, f64)>,
) -> Result<PowerLawFit, FitError> {
    let selected: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, _)| match range {
            Some((lo, hi)) => x >= lo && x <= hi,
            None => true,
        })
        .collect();
    if selected.len() < 2 {
        return Err(FitError::TooFewPoints(selected.len()));
    }
    for &(x, y) in &selected {
        if !(x > 0.0) || !(y > 0.0) {
            return Err(FitError::NonPositive { x, y });
        }
    }
    let n = selected.len() as f64;
    let logs: Vec<(f64, f64)> = selected.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;

    let (stderr_slope, stderr_intercept) = if selected.len() == 2 {
        (0.0, 0.0)
    } else {
        let ss_res: f64 = logs
            .iter()
            .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
            .sum();
        let var = ss_res / (n - 2.0);
        (
            (var / sxx).sqrt(),
            (var * (1.0 / n + mean_x * mean_x / sxx)).sqrt(),
        )
    };

    let prefactor = intercept.exp();
    let stderr_prefactor = prefactor * stderr_intercept;
    let x_min = selected.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = selected
        .iter()
        .map(|p| p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(PowerLawFit {
        prefactor,
        exponent: slope,
        stderr_exponent: stderr_slope,
        stderr_prefactor,
        sample_count: selected.len(),
        x_range: (x_min, x_max),
        exponent_notation: format_last_digit(slope, stderr_slope),
        prefactor_notation: format_last_digit(prefactor, stderr_prefactor),
    })
}

/// From P_c(0, t) ~ t^(-d_s/2): d_s = 2|exponent| with doubled error. The fit
/// exponent must be negative.
pub fn spectral_dimension_from_fit(fit: &PowerLawFit) -> Result<(f64, f64), FitError> {
    if fit.exponent >= 0.0 {
        return Err(FitError::NonDecaying(fit.exponent));
    }
    Ok((2.0 * fit.exponent.abs(), 2.0 * fit.stderr_exponent))
}
