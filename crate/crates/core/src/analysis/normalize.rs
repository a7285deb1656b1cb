//! Segmentation, time/amplitude normalization and elbow-variant labels.

use serde::{Deserialize, Serialize};

use super::{AngleSeries, NormalizedSeries, GRID_POINTS};
use crate::error::{Error, Result};
use crate::interp;
use crate::profiles::ElbowVariant;

/// Fraction of peak speed that counts as moving.
pub const SPEED_THRESHOLD: f64 = 0.05;
pub const MIN_PEAK_SPEED: f64 = 1e-3;
pub const MIN_SEGMENT_SAMPLES: usize = 20;
/// Shortest above-threshold run treated as motion rather than jitter.
pub const MIN_RUN_SECONDS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub i_start: usize,
    pub i_end: usize,
}

/// Speed by central differences (one-sided at the ends).
fn speed(series: &AngleSeries) -> Vec<f64> {
    let (t, q) = (&series.t, &series.theta);
    let n = t.len();
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            ((q[b] - q[a]) / (t[b] - t[a])).abs()
        })
        .collect()
}

/// First index of a run of at least `run` consecutive samples above `limit`.
fn first_run(v: impl Iterator<Item = f64>, limit: f64, run: usize) -> Option<usize> {
    let mut len = 0;
    for (i, s) in v.enumerate() {
        len = if s > limit { len + 1 } else { 0 };
        if len >= run {
            return Some(i + 1 - run);
        }
    }
    None
}

/// Finds the moving part of a recording: the first and last sustained runs
/// faster than 5% of the peak speed, widened outward to the neighbouring
/// speed minima.
pub fn segment_motion(series: &AngleSeries) -> Result<Segment> {
    let n = series.len();
    if n < MIN_SEGMENT_SAMPLES {
        return Err(Error::TooFewSamples {
            required: MIN_SEGMENT_SAMPLES,
            actual: n,
        });
    }
    let v = speed(series);
    let peak = v.iter().copied().fold(0.0, f64::max);
    if peak < MIN_PEAK_SPEED {
        return Err(Error::NoMotion { peak_speed: peak });
    }
    let limit = SPEED_THRESHOLD * peak;
    let dt = (series.t[n - 1] - series.t[0]) / (n - 1) as f64;
    let run = ((MIN_RUN_SECONDS / dt).round() as usize).max(3);
    // the peak itself always qualifies, even inside a short burst
    let peak_at = v.iter().position(|&s| s == peak).unwrap();
    let mut i_start = first_run(v.iter().copied(), limit, run)
        .unwrap_or(peak_at)
        .min(peak_at);
    let mut i_end = first_run(v.iter().rev().copied(), limit, run)
        .map_or(peak_at, |k| n - 1 - k)
        .max(peak_at);
    while i_start > 0 && v[i_start - 1] < v[i_start] {
        i_start -= 1;
    }
    while i_end + 1 < n && v[i_end + 1] < v[i_end] {
        i_end += 1;
    }
    Ok(Segment {
        t_start: series.t[i_start],
        t_end: series.t[i_end],
        i_start,
        i_end,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `(theta - theta_start) / (theta_end - theta_start)`: 0 -> 1.
    ShoulderStart0,
    /// `(theta - theta_min) / (theta_start - theta_min)`: starts at 1,
    /// minimum at 0.
    ElbowMin0,
}

/// Resamples to 101 uniform points over the series' time span and rescales
/// the amplitude by `convention`.
pub fn normalize(series: &AngleSeries, convention: Convention) -> Result<NormalizedSeries> {
    if series.len() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            actual: series.len(),
        });
    }
    let (t0, t1) = (series.t[0], series.t[series.len() - 1]);
    let last = (GRID_POINTS - 1) as f64;
    let u: Vec<f64> = (0..GRID_POINTS).map(|i| i as f64 / last).collect();
    let theta: Vec<f64> = u
        .iter()
        .map(|&s| interp::linear(&series.t, &series.theta, t0 + s * (t1 - t0)))
        .collect();

    let scale = theta.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let (origin, span) = match convention {
        Convention::ShoulderStart0 => (theta[0], theta[GRID_POINTS - 1] - theta[0]),
        Convention::ElbowMin0 => {
            let min = theta.iter().copied().fold(f64::INFINITY, f64::min);
            (min, theta[0] - min)
        }
    };
    if span.abs() <= 1e-12 * scale {
        return Err(Error::ZeroAmplitude);
    }
    let mut v: Vec<f64> = theta.iter().map(|x| (x - origin) / span).collect();
    // pin the defining samples exactly
    match convention {
        Convention::ShoulderStart0 => {
            v[0] = 0.0;
            v[GRID_POINTS - 1] = 1.0;
        }
        Convention::ElbowMin0 => {
            v[0] = 1.0;
            let i_min = theta
                .iter()
                .enumerate()
                .fold(0, |b, (i, x)| if *x < theta[b] { i } else { b });
            v[i_min] = 0.0;
        }
    }
    NormalizedSeries::new(u, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantThresholds {
    /// Latest minimum location still counted as a mid-motion dip.
    pub max_u_min: f64,
    /// Smallest re-extension after the minimum counted as a dip.
    pub min_rebound: f64,
}

impl Default for VariantThresholds {
    fn default() -> Self {
        Self {
            max_u_min: 0.75,
            min_rebound: 0.10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantLabel {
    pub label: ElbowVariant,
    pub u_min: f64,
    pub rebound: f64,
}

/// Labels an elbow curve by where its global minimum sits and how far it
/// climbs back afterwards.
pub fn classify_variant(n: &NormalizedSeries, thresholds: &VariantThresholds) -> VariantLabel {
    let i_min =
        n.v.iter()
            .enumerate()
            .fold(0, |b, (i, x)| if *x < n.v[b] { i } else { b });
    let u_min = n.u[i_min];
    let rebound = (n.v[n.v.len() - 1] - n.v[i_min]).max(0.0);
    let label = if u_min <= thresholds.max_u_min && rebound >= thresholds.min_rebound {
        ElbowVariant::V1
    } else {
        ElbowVariant::V2
    };
    VariantLabel {
        label,
        u_min,
        rebound,
    }
}

/// Pointwise mean of several curves sampled on the same grid.
pub fn mean_curve(curves: &[NormalizedSeries]) -> Result<NormalizedSeries> {
    let first = curves.first().ok_or(Error::TooFewSamples {
        required: 1,
        actual: 0,
    })?;
    if curves.iter().any(|c| c.u != first.u) {
        return Err(Error::InvalidParameter("curves use different grids".into()));
    }
    let k = curves.len() as f64;
    let v = (0..first.len())
        .map(|i| curves.iter().map(|c| c.v[i]).sum::<f64>() / k)
        .collect();
    NormalizedSeries::new(first.u.clone(), v)
}
