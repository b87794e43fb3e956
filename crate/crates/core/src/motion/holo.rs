use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{finite_c, Error, Result};

pub const DEFAULT_HOLO_TOL: f64 = 1e-8;
const MIN_CIRCLE_POINTS: usize = 16;

/// Values of `h` at the center and at `n` equally spaced points of `|λ - c| = r`
/// starting at angle 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloSample {
    pub center: Complex64,
    pub radius: f64,
    pub center_value: Complex64,
    pub circle: Vec<Complex64>,
}

pub fn sample_circle(
    h: impl Fn(Complex64) -> Result<Complex64>,
    center: Complex64,
    radius: f64,
    n: usize,
) -> Result<HoloSample> {
    let circle = (0..n)
        .map(|j| h(center + Complex64::from_polar(radius, TAU * j as f64 / n as f64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HoloSample {
        center,
        radius,
        center_value: h(center)?,
        circle,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloReport {
    /// `|h(c) - mean over the circle|`.
    pub mean_value_residual: f64,
    /// RMS size of the negative-frequency part on the circle.
    pub antiholomorphic: f64,
    /// RMS size of the modes `n ≥ N/4` of the power-series fit.
    pub tail: f64,
    pub residual: f64,
    pub holomorphic: bool,
}

/// Discrete mean-value and Fourier checks on a circle. The mean-value
/// identity alone misses functions such as `conj(λ)`, so the negative
/// frequencies count towards the residual too.
pub fn holomorphy_diagnostic(sample: &HoloSample, tol: f64) -> Result<HoloReport> {
    let n = sample.circle.len();
    if n < MIN_CIRCLE_POINTS {
        return Err(Error::Precondition(format!(
            "{n} circle points, at least {MIN_CIRCLE_POINTS} required"
        )));
    }
    finite_c(sample.center_value, "center value")?;
    let mut coef = sample.circle.clone();
    for v in &coef {
        finite_c(*v, "circle value")?;
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut coef);
    let inv = 1.0 / n as f64;
    coef.iter_mut().for_each(|c| *c *= inv);
    let mean_value_residual = (sample.center_value - coef[0]).norm();
    // index m > N/2 holds frequency m - N
    let energy = |range: std::ops::Range<usize>| coef[range].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let antiholomorphic = energy(n / 2 + 1..n);
    let tail = energy(n / 4..n / 2 + 1);
    let residual = mean_value_residual + antiholomorphic;
    Ok(HoloReport {
        mean_value_residual,
        antiholomorphic,
        tail,
        residual,
        holomorphic: residual < tol,
    })
}
