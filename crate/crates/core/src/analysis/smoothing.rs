//! Savitzky-Golay smoothing.

use nalgebra::{DMatrix, DVector};

use super::AngleSeries;
use crate::error::{Error, Result};

/// How samples closer than half a window to either end are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeMode {
    /// Evaluate the polynomial fitted to the first / last full window.
    /// Polynomials up to the filter order pass through unchanged.
    #[default]
    Interp,
    /// Reflect the signal about its end samples (end sample not repeated).
    Mirror,
    /// Treat the signal as periodic.
    Periodic,
}

/// Default `(window, order)` for a capture rate.
pub fn default_params(fps: f64) -> (usize, usize) {
    if fps >= 60.0 {
        (11, 3)
    } else {
        (5, 2)
    }
}

/// Weights that evaluate the least-squares polynomial of degree `order`,
/// fitted to samples at offsets `-half..=half`, at offset `x`.
fn weights_at(half: usize, order: usize, x: f64) -> Result<Vec<f64>> {
    let w = 2 * half + 1;
    let scale = half.max(1) as f64;
    let design = DMatrix::from_fn(w, order + 1, |i, k| {
        ((i as f64 - half as f64) / scale).powi(k as i32)
    });
    // Rows of pinv(A) via QR: A = QR  =>  pinv(A) = R^-1 Q^T.
    let qr = design.qr();
    let r = qr.r();
    let q = qr.q();
    let basis = DVector::from_fn(order + 1, |k, _| (x / scale).powi(k as i32));
    // e^T R^-1, solved as R^T y = e
    let y = r
        .transpose()
        .solve_lower_triangular(&basis)
        .ok_or(Error::RankDeficient)?;
    Ok((q * y).iter().copied().collect())
}

fn check(window: usize, order: usize, len: usize) -> Result<()> {
    if window < 5 || window.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "window must be odd and at least 5, got {window}"
        )));
    }
    if order >= window {
        return Err(Error::InvalidParameter(format!(
            "order {order} must be smaller than window {window}"
        )));
    }
    if len < window {
        return Err(Error::TooFewSamples {
            required: window,
            actual: len,
        });
    }
    Ok(())
}

/// Smooths raw samples; assumes uniform spacing.
pub fn savitzky_golay(
    data: &[f64],
    window: usize,
    order: usize,
    edge: EdgeMode,
) -> Result<Vec<f64>> {
    check(window, order, data.len())?;
    let n = data.len();
    let half = window / 2;
    let center = weights_at(half, order, 0.0)?;

    let sample = |i: isize| -> f64 {
        let n = n as isize;
        let j = match edge {
            EdgeMode::Periodic => i.rem_euclid(n),
            _ => {
                let mut j = i;
                // reflect until inside; one pass suffices since window <= n
                if j < 0 {
                    j = -j;
                }
                if j >= n {
                    j = 2 * (n - 1) - j;
                }
                j
            }
        };
        data[j as usize]
    };
    let convolve = |i: usize| -> f64 {
        center
            .iter()
            .enumerate()
            .map(|(k, w)| w * sample(i as isize + k as isize - half as isize))
            .sum()
    };

    let mut out: Vec<f64> = (0..n).map(convolve).collect();
    if edge == EdgeMode::Interp {
        for i in 0..half {
            let w = weights_at(half, order, i as f64 - half as f64)?;
            out[i] = w.iter().zip(&data[..window]).map(|(a, b)| a * b).sum();
            let tail = &data[n - window..];
            let w = weights_at(half, order, half as f64 - i as f64)?;
            out[n - 1 - i] = w.iter().zip(tail).map(|(a, b)| a * b).sum();
        }
    }
    Ok(out)
}

pub fn smooth_sg(
    series: &AngleSeries,
    window: usize,
    order: usize,
    edge: EdgeMode,
) -> Result<AngleSeries> {
    let theta = savitzky_golay(&series.theta, window, order, edge)?;
    AngleSeries::new(series.t.clone(), theta, series.primitive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classic_five_point_quadratic_weights() {
        // -3, 12, 17, 12, -3 over 35
        let w = weights_at(2, 2, 0.0).unwrap();
        let expected = [-3.0, 12.0, 17.0, 12.0, -3.0].map(|x| x / 35.0);
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn parameter_errors() {
        let d = vec![0.0; 20];
        assert!(savitzky_golay(&d, 4, 2, EdgeMode::Interp).is_err());
        assert!(savitzky_golay(&d, 3, 1, EdgeMode::Interp).is_err());
        assert!(savitzky_golay(&d, 7, 7, EdgeMode::Interp).is_err());
        assert!(savitzky_golay(&d[..6], 7, 2, EdgeMode::Interp).is_err());
    }

    #[test]
    fn constant_unchanged_in_every_mode() {
        let d = vec![2.5; 30];
        for edge in [EdgeMode::Interp, EdgeMode::Mirror, EdgeMode::Periodic] {
            let s = savitzky_golay(&d, 11, 3, edge).unwrap();
            assert!(s.iter().all(|v| (v - 2.5).abs() < 1e-12));
        }
    }

    #[test]
    fn cubic_reproduced() {
        let d: Vec<f64> = (0..60)
            .map(|i| {
                let t = i as f64 * 0.1;
                0.3 * t * t * t - 2.0 * t * t + t - 4.0
            })
            .collect();
        let s = savitzky_golay(&d, 11, 3, EdgeMode::Interp).unwrap();
        for (a, b) in s.iter().zip(&d) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn impulse_noise_attenuated() {
        // A line with isolated spikes. A 21/3 filter keeps ~0.108 of a spike
        // at its center sample.
        let line: Vec<f64> = (0..120).map(|i| 0.02 * i as f64).collect();
        let mut noisy = line.clone();
        for i in [25, 60, 95] {
            noisy[i] += 1.0;
        }
        let s = savitzky_golay(&noisy, 21, 3, EdgeMode::Interp).unwrap();
        let before = noisy
            .iter()
            .zip(&line)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let after = s
            .iter()
            .zip(&line)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(after * 5.0 <= before, "{before} -> {after}");
    }

    #[test]
    fn mirror_edges_are_symmetric() {
        let d: Vec<f64> = (0..15).map(|i| ((i as f64) * 0.7).sin()).collect();
        let s = savitzky_golay(&d, 5, 2, EdgeMode::Mirror).unwrap();
        let w = weights_at(2, 2, 0.0).unwrap();
        let first = w[0] * d[2] + w[1] * d[1] + w[2] * d[0] + w[3] * d[1] + w[4] * d[2];
        assert!((s[0] - first).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn periodic_preserves_mean(noise in prop::collection::vec(-0.05f64..0.05, 200), level in -10.0f64..10.0) {
            let d: Vec<f64> = noise.iter().map(|e| level + e).collect();
            let s = savitzky_golay(&d, 11, 3, EdgeMode::Periodic).unwrap();
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            prop_assert!((mean(&s) - mean(&d)).abs() < 1e-6);
        }
    }
}
