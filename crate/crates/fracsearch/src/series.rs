//! Uniform-stride time series and its CSV representation.

use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("series is empty")]
    Empty,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: malformed CSV row: {reason}")]
    Malformed {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("{path}: non-uniform time stride at line {line}")]
    NonUniformStride { path: String, line: usize },
}

/// (t, value) samples at a fixed stride, starting at `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    start: u64,
    stride: u64,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(start: u64, stride: u64, values: Vec<f64>) -> Result<Self, SeriesError> {
        if values.is_empty() {
            return Err(SeriesError::Empty);
        }
        assert!(stride >= 1, "stride must be at least 1");
        Ok(TimeSeries {
            start,
            stride,
            values,
        })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn stride(&self) -> u64 {
        self.stride
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time_at(&self, idx: usize) -> u64 {
        self.start + self.stride * idx as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| (self.time_at(k), v))
    }

    /// Samples with t in [tmin, tmax], as (t, value) pairs.
    pub fn window(&self, tmin: u64, tmax: u64) -> Vec<(f64, f64)> {
        self.iter()
            .filter(|&(t, _)| t >= tmin && t <= tmax)
            .map(|(t, v)| (t as f64, v))
            .collect()
    }

    /// Renders the `t,P` CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 28 + 4);
        out.push_str("t,P\n");
        for (t, v) in self.iter() {
            writeln!(out, "{},{:.16e}", t, v).unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), SeriesError> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self, SeriesError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text, &path.display().to_string())
    }

    pub fn parse_csv(text: &str, path: &str) -> Result<Self, SeriesError> {
        let malformed = |line: usize, reason: &str| SeriesError::Malformed {
            path: path.to_string(),
            line,
            reason: reason.to_string(),
        };
        let mut times: Vec<u64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            if line == 1 {
                continue; // header
            }
            if raw.trim().is_empty() {
                continue;
            }
            let (t_str, v_str) = raw
                .split_once(',')
                .ok_or_else(|| malformed(line, "expected two comma-separated fields"))?;
            let t: u64 = t_str
                .trim()
                .parse()
                .map_err(|_| malformed(line, "time column is not a non-negative integer"))?;
            let v: f64 = v_str
                .trim()
                .parse()
                .map_err(|_| malformed(line, "value column is not a number"))?;
            if let Some(&prev) = times.last() {
                if t <= prev {
                    return Err(malformed(line, "time column is not strictly increasing"));
                }
            }
            times.push(t);
            values.push(v);
        }
        if values.is_empty() {
            return Err(SeriesError::Empty);
        }
        let stride = if times.len() >= 2 { times[1] - times[0] } else { 1 };
        for (k, &t) in times.iter().enumerate() {
            if t != times[0] + stride * k as u64 {
                return Err(SeriesError::NonUniformStride {
                    path: path.to_string(),
                    line: k + 2,
                });
            }
        }
        TimeSeries::new(times[0], stride, values)
    }
}

/// Parses generic two-column numeric CSV (any header) into (x, y) points.
pub fn parse_points_csv(text: &str, path: &str) -> Result<Vec<(f64, f64)>, SeriesError> {
    let mut points = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if line == 1 || raw.trim().is_empty() {
            continue;
        }
        let malformed = |reason: &str| SeriesError::Malformed {
            path: path.to_string(),
            line,
            reason: reason.to_string(),
        };
        let (x_str, y_str) = raw
            .split_once(',')
            .ok_or_else(|| malformed("expected two comma-separated fields"))?;
        let x: f64 = x_str
            .trim()
            .parse()
            .map_err(|_| malformed("first column is not a number"))?;
        let y: f64 = y_str
            .trim()
            .parse()
            .map_err(|_| malformed("second column is not a number"))?;
        points.push((x, y));
    }
    if points.is_empty() {
        return Err(SeriesError::Empty);
    }
    Ok(points)
}
