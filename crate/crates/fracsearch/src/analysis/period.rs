//! Dominant-period extraction from an oscillatory series via the FFT.

use crate::series::TimeSeries;
use rustfft::{num_complex::Complex64, FftPlanner};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PeriodError {
    #[error("series has {0} samples; period estimation needs at least 64")]
    TooShort(usize),
    #[error("period analysis needs a stride-1 series (got stride {0})")]
    NonUnitStride(u64),
    #[error("no dominant oscillation: dominant bin carries {ratio:.4} of the non-DC power (threshold 0.05)")]
    NoDominantOscillation { ratio: f64 },
    #[error("series covers fewer than 4 periods of the dominant oscillation")]
    InsufficientSpan,
    #[error("series spans fewer than 2 complete windows of length {0}")]
    InsufficientWindows(usize),
}

/// Window function applied before the FFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Windowing {
    None,
    Hann,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodEstimate {
    /// Oscillation period in steps (the optimal oracle-call count Q).
    pub period: f64,
    /// Dominant frequency in cycles per step.
    pub frequency: f64,
    /// Dominant-bin power over total non-DC power.
    pub spectral_power_ratio: f64,
    /// Set when the bin at half the dominant period carries more than 25% of
    /// the dominant bin's power.
    pub harmonic_suspected: bool,
}

/// Fraction of non-DC power the dominant bin must carry.
const MIN_POWER_RATIO: f64 = 0.05;

/// Estimates the dominant oscillation period: mean-subtract, FFT, take the
/// strongest non-DC bin, refine by parabolic interpolation of log magnitudes
/// over the peak bin and its neighbors.
pub fn estimate_period(
    series: &TimeSeries,
    windowing: Windowing,
) -> Result<PeriodEstimate, PeriodError> {
    if series.stride() != 1 {
        return Err(PeriodError::NonUnitStride(series.stride()));
    }
    let n = series.len();
    if n < 64 {
        return Err(PeriodError::TooShort(n));
    }
    let mean = series.values().iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = series
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let w = match windowing {
                Windowing::None => 1.0,
                Windowing::Hann => {
                    let phase = std::f64::consts::TAU * k as f64 / (n - 1) as f64;
                    0.5 * (1.0 - phase.cos())
                }
            };
            Complex64::new((v - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let power: Vec<f64> = buf[..=half].iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = power[1..].iter().sum();
    let (peak_bin, &peak_power) = power[1..]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, p)| (k + 1, p))
        .expect("non-empty spectrum");
    let ratio = if total > 0.0 { peak_power / total } else { 0.0 };
    if !(ratio >= MIN_POWER_RATIO) {
        return Err(PeriodError::NoDominantOscillation { ratio });
    }
    if peak_bin < 4 {
        // fewer than 4 full periods fit into the record
        return Err(PeriodError::InsufficientSpan);
    }

    let refined = refine_bin(&buf, peak_bin, half);
    let frequency = refined / n as f64;
    let period = 1.0 / frequency;
    if period <= 2.0 {
        return Err(PeriodError::NoDominantOscillation { ratio });
    }

    // harmonic check at twice the dominant frequency
    let harmonic_bin = peak_bin * 2;
    let harmonic_suspected =
        harmonic_bin <= half && power[harmonic_bin] > 0.25 * peak_power;

    Ok(PeriodEstimate {
        period,
        frequency,
        spectral_power_ratio: ratio,
        harmonic_suspected,
    })
}

/// Parabolic interpolation over log magnitudes of the peak bin and its two
/// neighbors; falls back to the raw bin at the spectrum edges.
fn refine_bin(spectrum: &[Complex64], k: usize, half: usize) -> f64 {
    if k == 0 || k + 1 > half {
        return k as f64;
    }
    let (a, b, c) = (
        spectrum[k - 1].norm(),
        spectrum[k].norm(),
        spectrum[k + 1].norm(),
    );
    if a <= 0.0 || b <= 0.0 || c <= 0.0 {
        return k as f64;
    }
    let (la, lb, lc) = (a.ln(), b.ln(), c.ln());
    let denom = la - 2.0 * lb + lc;
    if denom.abs() < 1e-300 {
        return k as f64;
    }
    let delta = 0.5 * (la - lc) / denom;
    k as f64 + delta.clamp(-0.5, 0.5)
}

/// Mean of the per-window maxima over consecutive disjoint windows of length
/// round(period), aligned from the start of the series. Partial trailing
/// windows are discarded.
pub fn mean_peak_probability(series: &TimeSeries, period: f64) -> Result<f64, PeriodError> {
    let w = (period.round() as usize).max(1);
    let complete = series.len() / w;
    if complete < 2 {
        return Err(PeriodError::InsufficientWindows(w));
    }
    let maxima = series.values()[..complete * w]
        .chunks(w)
        .map(|win| win.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    Ok(maxima.sum::<f64>() / complete as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine_series(n: usize, mean: f64, amp: f64, period: f64) -> TimeSeries {
        let values = (0..n)
            .map(|t| mean + amp * (std::f64::consts::TAU * t as f64 / period).sin())
            .collect();
        TimeSeries::new(0, 1, values).unwrap()
    }

    #[test]
    fn recovers_synthetic_period() {
        let series = sine_series(8192, 0.3, 0.1, 100.0);
        let est = estimate_period(&series, Windowing::None).unwrap();
        assert!(
            (est.period - 100.0).abs() / 100.0 < 0.01,
            "period {}",
            est.period
        );
        assert!(!est.harmonic_suspected);
    }

    #[test]
    fn constant_series_has_no_oscillation() {
        let series = TimeSeries::new(0, 1, vec![0.7; 512]).unwrap();
        assert!(matches!(
            estimate_period(&series, Windowing::None),
            Err(PeriodError::NoDominantOscillation { .. })
        ));
    }

    #[test]
    fn short_series_rejected() {
        let series = sine_series(32, 0.0, 1.0, 8.0);
        assert!(matches!(
            estimate_period(&series, Windowing::None),
            Err(PeriodError::TooShort(32))
        ));
    }

    #[test]
    fn too_few_periods_rejected() {
        // period 512 in a 1024-sample record: only 2 periods
        let series = sine_series(1024, 0.0, 1.0, 512.0);
        assert!(matches!(
            estimate_period(&series, Windowing::None),
            Err(PeriodError::InsufficientSpan)
        ));
    }

    #[test]
    fn shift_and_scale_invariance() {
        let base = sine_series(4096, 0.2, 0.05, 73.0);
        let q0 = estimate_period(&base, Windowing::None).unwrap().period;
        let shifted = TimeSeries::new(
            0,
            1,
            base.values().iter().map(|v| v + 5.0).collect(),
        )
        .unwrap();
        let scaled = TimeSeries::new(
            0,
            1,
            base.values().iter().map(|v| v * 3.5).collect(),
        )
        .unwrap();
        let q1 = estimate_period(&shifted, Windowing::None).unwrap().period;
        let q2 = estimate_period(&scaled, Windowing::None).unwrap().period;
        assert!((q1 - q0).abs() / q0 < 1e-3);
        assert!((q2 - q0).abs() / q0 < 1e-3);
    }

    #[test]
    fn hann_window_works_on_short_records() {
        let series = sine_series(512, 0.0, 1.0, 37.5);
        let est = estimate_period(&series, Windowing::Hann).unwrap();
        assert!((est.period - 37.5).abs() / 37.5 < 0.02, "period {}", est.period);
    }

    #[test]
    fn harmonic_flagged_for_sharp_peaks() {
        // strong second harmonic riding on the fundamental
        let values: Vec<f64> = (0..4096)
            .map(|t| {
                let phase = std::f64::consts::TAU * t as f64 / 64.0;
                phase.sin() + 0.8 * (2.0 * phase).sin()
            })
            .collect();
        let series = TimeSeries::new(0, 1, values).unwrap();
        let est = estimate_period(&series, Windowing::None).unwrap();
        assert!(est.harmonic_suspected);
    }

    #[test]
    fn mean_peak_of_sinusoid() {
        let series = sine_series(4096, 0.3, 0.1, 100.0);
        let peak = mean_peak_probability(&series, 100.0).unwrap();
        assert!((peak - 0.4).abs() / 0.4 < 0.02, "peak {peak}");
    }

    #[test]
    fn mean_peak_of_constant() {
        let series = TimeSeries::new(0, 1, vec![0.25; 300]).unwrap();
        assert_eq!(mean_peak_probability(&series, 50.0).unwrap(), 0.25);
    }

    #[test]
    fn mean_peak_needs_two_windows() {
        let series = TimeSeries::new(0, 1, vec![0.25; 100]).unwrap();
        assert!(matches!(
            mean_peak_probability(&series, 80.0),
            Err(PeriodError::InsufficientWindows(80))
        ));
    }
}
