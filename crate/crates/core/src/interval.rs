//! Closed intervals and order statistics.
//!
//! An [`Interval`] is the numeric range a policy deems legitimate for a
//! computed value. The percentile rule used throughout is linear
//! interpolation between order statistics at rank `(n - 1) * p`.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("interval endpoints must be finite (got [{0}, {1}])")]
    NonFinite(f64, f64),
    #[error("interval is inverted: lower bound {0} exceeds upper bound {1}")]
    Inverted(f64, f64),
    #[error("empty data")]
    Empty,
    #[error("percentile must lie in [0, 1], got {0}")]
    PercentileOutOfRange(f64),
    #[error("data contains a non-finite value")]
    NonFiniteData,
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, StatsError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(StatsError::NonFinite(lo, hi));
        }
        if lo > hi {
            return Err(StatsError::Inverted(lo, hi));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Result<Self, StatsError> {
        Self::new(x, x)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Both endpoints are inside.
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Interval grown by `tol` on each side. `tol` must be nonnegative.
    pub fn widen(&self, tol: f64) -> Self {
        debug_assert!(tol >= 0.0);
        Self {
            lo: self.lo - tol,
            hi: self.hi + tol,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn sorted(data: &[f64]) -> Result<Vec<f64>, StatsError> {
    if data.is_empty() {
        return Err(StatsError::Empty);
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFiniteData);
    }
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

fn percentile_sorted(v: &[f64], p: f64) -> f64 {
    let rank = (v.len() - 1) as f64 * p;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    if lo == hi {
        v[lo]
    } else {
        v[lo] + (v[hi] - v[lo]) * frac
    }
}

/// Percentile at `p` in `[0, 1]` by linear interpolation at rank `(n - 1) * p`.
pub fn percentile(data: &[f64], p: f64) -> Result<f64, StatsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StatsError::PercentileOutOfRange(p));
    }
    let v = sorted(data)?;
    Ok(percentile_sorted(&v, p))
}

pub fn median(data: &[f64]) -> Result<f64, StatsError> {
    percentile(data, 0.5)
}

/// Interquartile range, `Q3 - Q1`.
pub fn iqr(data: &[f64]) -> Result<f64, StatsError> {
    let v = sorted(data)?;
    Ok(percentile_sorted(&v, 0.75) - percentile_sorted(&v, 0.25))
}
