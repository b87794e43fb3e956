//! Complex-plane primitives and the closed-form bounds for complex stretching
//! exponents.
//!
//! The disks here are the reference regions the estimators are checked
//! against: the line-restricted disk with real diameter
//! `[1/(1+k²), 1/(1-k²)]`, the general `s`-dimensional diameters, and the
//! multifractal dimension bound for prescribed stretching and rotation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{finite, finite_c, Error, Result};

/// Default slack for disk membership of estimated exponents.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

fn check_k(k: f64) -> Result<f64> {
    let k = finite(k, "k")?;
    if (0.0..1.0).contains(&k) {
        Ok(k)
    } else {
        Err(Error::Domain(format!("k = {k} is outside [0, 1)")))
    }
}

/// Closed disk `B̄(center, radius)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        let center = finite_c(center, "disk center")?;
        let radius = finite(radius, "disk radius")?;
        if radius < 0.0 {
            return Err(Error::Domain(format!("negative radius {radius}")));
        }
        Ok(Self { center, radius })
    }

    /// The disk symmetric about the real axis whose real diameter is `iv`.
    pub fn from_real_diameter(iv: Interval) -> Self {
        Self {
            center: Complex64::new(0.5 * (iv.lo + iv.hi), 0.0),
            radius: 0.5 * (iv.hi - iv.lo),
        }
    }

    /// Distance from `z` to the disk; zero inside.
    pub fn distance(&self, z: Complex64) -> f64 {
        ((z - self.center).norm() - self.radius).max(0.0)
    }

    /// Signed margin `radius - |z - center|`; negative outside.
    pub fn margin(&self, z: Complex64) -> f64 {
        self.radius - (z - self.center).norm()
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.distance(z) <= tol
    }

    pub fn contains_disk(&self, other: &Disk, tol: f64) -> bool {
        (other.center - self.center).norm() + other.radius <= self.radius + tol
    }

    /// Intersection with the real axis, when the center is real.
    pub fn real_diameter(&self) -> Option<Interval> {
        (self.center.im == 0.0).then(|| Interval {
            lo: self.center.re - self.radius,
            hi: self.center.re + self.radius,
        })
    }

    /// Largest `|Im w / Re w|` over the disk; infinite if the disk meets the
    /// imaginary axis.
    pub fn max_slope(&self) -> f64 {
        let c = self.center.norm();
        if c <= self.radius {
            return f64::INFINITY;
        }
        // Angle of the tangent line from the origin, offset by the center's argument.
        let half = (self.radius / c).asin();
        let arg = self.center.arg();
        let lo = arg - half;
        let hi = arg + half;
        if lo <= -PI / 2.0 || hi >= PI / 2.0 {
            return f64::INFINITY;
        }
        lo.tan().abs().max(hi.tan().abs())
    }
}

/// Closed real interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let lo = finite(lo, "interval lo")?;
        let hi = finite(hi, "interval hi")?;
        if lo > hi {
            return Err(Error::Domain(format!("interval [{lo}, {hi}] is reversed")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The disk `B̄(1/(1-k⁴), k²/(1-k⁴))` containing a.e. exponent set along a line.
pub fn theorem_disk(k: f64) -> Result<Disk> {
    let k = check_k(k)?;
    let k2 = k * k;
    let denom = 1.0 - k2 * k2;
    Ok(Disk {
        center: Complex64::new(1.0 / denom, 0.0),
        radius: k2 / denom,
    })
}

/// Maximal rotation rate `k²/√(1-k⁴)` allowed by [`theorem_disk`].
pub fn rotation_bound(k: f64) -> Result<f64> {
    let k = check_k(k)?;
    let k2 = k * k;
    Ok(k2 / (1.0 - k2 * k2).sqrt())
}

/// Real diameter of the exponent disk valid a.e. for `s`-dimensional Hausdorff
/// measure, `s ∈ [0, 2]`.
pub fn general_diameter(s: f64, k: f64) -> Result<Interval> {
    let k = check_k(k)?;
    let s = finite(s, "s")?;
    if !(0.0..=2.0).contains(&s) {
        return Err(Error::Domain(format!("s = {s} is outside [0, 2]")));
    }
    let lo = (1.0 - k) / (1.0 + k) + k * s / (1.0 + k);
    let hi = (1.0 + k) / (1.0 - k) - k * s / (1.0 - k);
    // At s = 2 both endpoints are 1 up to rounding.
    Ok(Interval {
        lo: lo.min(hi),
        hi: hi.max(lo),
    })
}

/// Upper bound for the dimension of the set where `α(1+iγ)` is a complex
/// stretching exponent. Negative values mean the exponent cannot occur.
pub fn aips_bound(alpha: f64, gamma: f64, k: f64) -> Result<f64> {
    let alpha = finite(alpha, "alpha")?;
    let gamma = finite(gamma, "gamma")?;
    let k = finite(k, "k")?;
    if alpha <= 0.0 {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("k = {k} is outside (0, 1)")));
    }
    let a1 = 1.0 - alpha;
    let root = (a1 * a1 + (1.0 - k * k) * alpha * alpha * gamma * gamma).sqrt();
    Ok(1.0 + alpha - root / k)
}

/// A logarithm continued along a curve sampled at decreasing `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchedLog {
    samples: Vec<(f64, Complex64)>,
}

impl BranchedLog {
    pub fn samples(&self) -> &[(f64, Complex64)] {
        &self.samples
    }

    pub fn values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.samples.iter().map(|&(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Continue `log w(t)` along the samples, principal branch at the first (largest) `t`.
///
/// Each step takes the branch nearest the previous value. A wrapped argument
/// step of magnitude `>= max_step` is rejected; `max_step` must not exceed π.
pub fn branch_log_with_limit(
    ts: &[f64],
    points: &[Complex64],
    max_step: f64,
) -> Result<BranchedLog> {
    if ts.len() != points.len() {
        return Err(Error::Domain(format!(
            "{} parameters for {} curve points",
            ts.len(),
            points.len()
        )));
    }
    let max_step = max_step.min(PI);
    let mut samples = Vec::with_capacity(points.len());
    let mut prev_im = 0.0;
    for (i, (&t, &w)) in ts.iter().zip(points).enumerate() {
        finite(t, "curve parameter")?;
        finite_c(w, "curve point")?;
        if w.norm() == 0.0 {
            return Err(Error::Singular(format!("curve passes through 0 at t = {t:e}")));
        }
        let principal = w.ln();
        let im = if i == 0 {
            principal.im
        } else {
            let step = wrap_angle(principal.im - prev_im);
            if step.abs() >= max_step {
                return Err(Error::BranchJump {
                    index: i - 1,
                    jump: step.abs(),
                });
            }
            prev_im + step
        };
        prev_im = im;
        samples.push((t, Complex64::new(principal.re, im)));
    }
    Ok(BranchedLog { samples })
}

/// [`branch_log_with_limit`] with the largest admissible step, π.
pub fn branch_log(ts: &[f64], points: &[Complex64]) -> Result<BranchedLog> {
    branch_log_with_limit(ts, points, PI)
}

/// Reduce an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = a % two_pi;
    if r <= -PI {
        r += two_pi;
    } else if r > PI {
        r -= two_pi;
    }
    r
}
