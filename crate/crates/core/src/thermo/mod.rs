//! Pressure, entropy and complex Lyapunov exponents of disk systems moved by
//! a holomorphic family of maps.

mod dimension;
mod inclusion;

pub use dimension::{
    box_dimension, dyadic_scales, ifs_attractor, image_dimension_experiment, Attractor, BoxDimension,
    DimensionReport, IfsSystem, SetSampler,
};
pub use inclusion::{apu_check, apu_disk, techni_check, ApuPoint, ApuReport, TechniReport};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{finite, finite_c, Error, Result};
use crate::geometry::wrap_angle;
use crate::maps::{quasisymmetry_constant, PlanarMap};
use crate::motion::MotionFamily;

pub const PROBABILITY_TOL: f64 = 1e-12;
const MORAN_LO: f64 = 1e-9;
const MORAN_HI: f64 = 2.0;
const MORAN_ITERS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskEntry {
    pub x: f64,
    pub r: f64,
}

/// Disjoint disks `B(x_j, r_j) ⊂ 𝔻` centered on the real line, with scale `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSystem {
    entries: Vec<DiskEntry>,
    a: f64,
}

impl DiskSystem {
    pub fn new(entries: Vec<DiskEntry>, a: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("disk system has no entries".into()));
        }
        let a = finite(a, "scale a")?;
        if a <= 0.0 {
            return Err(Error::Domain(format!("scale a = {a} must be positive")));
        }
        for (j, e) in entries.iter().enumerate() {
            finite(e.x, "disk center")?;
            finite(e.r, "disk radius")?;
            if e.r <= 0.0 {
                return Err(Error::Domain(format!("disk {j} has radius {}", e.r)));
            }
            if e.x.abs() + e.r >= 1.0 {
                return Err(Error::Domain(format!("disk {j} is not inside the unit disk")));
            }
        }
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                let (p, q) = (entries[i], entries[j]);
                if (p.x - q.x).abs() <= p.r + q.r {
                    return Err(Error::Domain(format!("disks {i} and {j} intersect")));
                }
            }
        }
        Ok(Self { entries, a })
    }

    /// A system whose scaled radii `a·r_j` are the given moduli, with disks
    /// laid out left to right on `(-1, 1)`.
    pub fn with_moduli(moduli: &[f64]) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::Domain("no moduli".into()));
        }
        for &m in moduli {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::Domain(format!("modulus {m} must be positive")));
            }
        }
        let total: f64 = moduli.iter().sum();
        // radii fill 80% of the diameter; the rest is split into equal gaps
        let a = 1.25 * total;
        let gap = 0.4 / (moduli.len() + 1) as f64;
        let mut left = -1.0 + gap;
        let entries = moduli
            .iter()
            .map(|&m| {
                let r = m / a;
                let e = DiskEntry { x: left + r, r };
                left += 2.0 * r + gap;
                e
            })
            .collect();
        Self::new(entries, a)
    }

    pub fn entries(&self) -> &[DiskEntry] {
        &self.entries
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ (a r_j)^δ`.
    pub fn scaled_sum(&self, delta: f64) -> f64 {
        self.entries.iter().map(|e| (self.a * e.r).powf(delta)).sum()
    }
}

/// `a = 1/C²` with `C` the empirical quasisymmetry constant of `f` on 𝔻.
pub fn scale_from_quasisymmetry<R: Rng>(f: &dyn PlanarMap, triples: usize, rng: &mut R) -> Result<f64> {
    let c = quasisymmetry_constant(f, 1.0, triples, rng)?;
    Ok(1.0 / (c * c))
}

pub type RadiusFn = Arc<dyn Fn(usize, Complex64) -> Result<Complex64> + Send + Sync>;

/// How the complex radii `r_j(λ)` depend on `λ`.
#[derive(Clone)]
pub enum RadiiSource {
    Stationary,
    /// `r_j(λ) = (a r_j)^{τ(λ)}`, `τ(λ) = (1 + mλ/k)/(1 - mλ/k)`: every disk
    /// treated as centered at the spiral's center.
    IdealizedSpiral { m: Complex64, k: f64 },
    /// `r_j(λ) = a(φ_λ(x_j + r_j) - φ_λ(x_j))`.
    Motion(Arc<MotionFamily>),
    Custom(RadiusFn),
}

impl fmt::Debug for RadiiSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Stationary => write!(f, "Stationary"),
            Self::IdealizedSpiral { m, k } => write!(f, "IdealizedSpiral {{ m: {m}, k: {k} }}"),
            Self::Motion(m) => write!(f, "Motion({m:?})"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MovedSystem {
    base: DiskSystem,
    source: RadiiSource,
}

impl MovedSystem {
    pub fn new(base: DiskSystem, source: RadiiSource) -> Self {
        Self { base, source }
    }

    pub fn stationary(base: DiskSystem) -> Self {
        Self::new(base, RadiiSource::Stationary)
    }

    pub fn base(&self) -> &DiskSystem {
        &self.base
    }

    pub fn source(&self) -> &RadiiSource {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    fn log_r0(&self, j: usize) -> f64 {
        let e = self.base.entries[j];
        (self.base.a * e.r).ln()
    }

    pub fn radius(&self, j: usize, lambda: Complex64) -> Result<Complex64> {
        let lambda = finite_c(lambda, "lambda")?;
        let e = self.base.entries[j];
        let a = self.base.a;
        match &self.source {
            RadiiSource::Stationary => Ok(Complex64::new(a * e.r, 0.0)),
            RadiiSource::IdealizedSpiral { .. } => Ok(self.log_radius(j, lambda)?.exp()),
            RadiiSource::Motion(fam) => {
                let hi = fam.eval(lambda, Complex64::new(e.x + e.r, 0.0))?;
                let lo = fam.eval(lambda, Complex64::new(e.x, 0.0))?;
                Ok((hi - lo) * a)
            }
            RadiiSource::Custom(f) => f(j, lambda),
        }
    }

    /// The center `a φ_λ(x_j)` of the moved disk (`a x_j` when the source
    /// carries no map).
    pub fn center(&self, j: usize, lambda: Complex64) -> Result<Complex64> {
        let e = self.base.entries[j];
        match &self.source {
            RadiiSource::Motion(fam) => Ok(fam.eval(lambda, Complex64::new(e.x, 0.0))? * self.base.a),
            _ => Ok(Complex64::new(self.base.a * e.x, 0.0)),
        }
    }

    /// `log r_j(λ)` continued from the real value at `λ = 0` along the segment `[0, λ]`.
    pub fn log_radius(&self, j: usize, lambda: Complex64) -> Result<Complex64> {
        let lambda = finite_c(lambda, "lambda")?;
        let l0 = self.log_r0(j);
        match &self.source {
            RadiiSource::Stationary => Ok(Complex64::new(l0, 0.0)),
            RadiiSource::IdealizedSpiral { m, k } => {
                let w = if *k == 0.0 { Complex64::new(0.0, 0.0) } else { m * lambda / k };
                if w.norm() >= 1.0 {
                    return Err(Error::DegenerateMotion(w.norm()));
                }
                Ok((1.0 + w) / (1.0 - w) * l0)
            }
            RadiiSource::Motion(fam) => match fam.ray_path(lambda) {
                Some(path) => continue_along(|l| self.radius(j, l), &path, l0),
                None => continue_adaptive(|l| self.radius(j, l), lambda, l0),
            },
            RadiiSource::Custom(_) => continue_adaptive(|l| self.radius(j, l), lambda, l0),
        }
    }
}

fn next_branch(prev: Complex64, w: Complex64, limit: f64, at: usize) -> Result<Complex64> {
    if w.norm() == 0.0 || !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::Singular(format!("complex radius vanishes or is not finite: {w}")));
    }
    let p = w.ln();
    let step = wrap_angle(p.im - prev.im);
    if step.abs() >= limit {
        return Err(Error::BranchJump { index: at, jump: step.abs() });
    }
    Ok(Complex64::new(p.re, prev.im + step))
}

/// Nearest-branch continuation through fixed path points; the first point
/// follows `λ = 0`.
fn continue_along(
    radius: impl Fn(Complex64) -> Result<Complex64>,
    path: &[Complex64],
    l0: f64,
) -> Result<Complex64> {
    let mut cur = Complex64::new(l0, 0.0);
    for (i, &l) in path.iter().enumerate() {
        cur = next_branch(cur, radius(l)?, FRAC_PI_2, i)?;
    }
    Ok(cur)
}

/// Continuation along `[0, λ]`, halving the step whenever the argument jumps
/// by `π/2` or more.
fn continue_adaptive(radius: impl Fn(Complex64) -> Result<Complex64>, lambda: Complex64, l0: f64) -> Result<Complex64> {
    const MAX_STEP: f64 = 1.0 / 16.0;
    const MIN_STEP: f64 = 1e-9;
    let mut cur = Complex64::new(l0, 0.0);
    if lambda.norm() == 0.0 {
        return Ok(cur);
    }
    let mut s = 0.0;
    let mut step = MAX_STEP;
    let mut count = 0;
    while s < 1.0 {
        let next = (s + step).min(1.0);
        match next_branch(cur, radius(lambda * next)?, FRAC_PI_2, count) {
            Ok(v) => {
                cur = v;
                s = next;
                count += 1;
                step = (2.0 * step).min(MAX_STEP);
            }
            Err(Error::BranchJump { index, jump }) => {
                step *= 0.5;
                if step < MIN_STEP {
                    return Err(Error::BranchJump { index, jump });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(cur)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Domain("empty probability vector".into()));
        }
        for &v in &p {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!("invalid probability {v}")));
            }
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::Domain(format!("probabilities sum to {s}")));
        }
        Ok(Self(p))
    }

    /// Normalize nonnegative weights.
    pub fn from_weights(w: &[f64]) -> Result<Self> {
        let s: f64 = w.iter().sum();
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain("weights must have a positive finite sum".into()));
        }
        Self::new(w.iter().map(|v| v / s).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(&vec![1.0; n])
    }

    pub fn point_mass(n: usize, j: usize) -> Result<Self> {
        if j >= n {
            return Err(Error::Domain(format!("index {j} out of {n}")));
        }
        let mut p = vec![0.0; n];
        p[j] = 1.0;
        Self::new(p)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn log_moduli(sys: &MovedSystem, lambda: Complex64) -> Result<Vec<f64>> {
    if sys.is_empty() {
        return Err(Error::Domain("empty system".into()));
    }
    (0..sys.len())
        .map(|j| match &sys.source {
            RadiiSource::IdealizedSpiral { .. } | RadiiSource::Stationary => Ok(sys.log_radius(j, lambda)?.re),
            _ => Ok(sys.radius(j, lambda)?.norm().ln()),
        })
        .collect()
}

fn log_sum_exp(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = v.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `P_λ(d) = log Σ |r_j(λ)|^d`.
pub fn pressure(sys: &MovedSystem, lambda: Complex64, d: f64) -> Result<f64> {
    let d = finite(d, "d")?;
    if !(d > 0.0 && d <= 2.0) {
        return Err(Error::Domain(format!("d = {d} is outside (0, 2]")));
    }
    let lm = log_moduli(sys, lambda)?;
    Ok(pressure_from_log_moduli(&lm, d))
}

fn pressure_from_log_moduli(lm: &[f64], d: f64) -> f64 {
    log_sum_exp(lm.iter().map(|l| d * l))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoranRoot {
    pub dimension: f64,
    /// Set when the root is clamped to 0 (one entry) or 2 (`P(2) > 0`).
    pub saturated: bool,
}

/// Root of `P_λ(d) = 0` by bisection on `[1e-9, 2]`.
pub fn moran_dimension(sys: &MovedSystem, lambda: Complex64) -> Result<MoranRoot> {
    let lm = log_moduli(sys, lambda)?;
    moran_from_log_moduli(&lm)
}

pub fn moran_from_log_moduli(lm: &[f64]) -> Result<MoranRoot> {
    if lm.is_empty() {
        return Err(Error::Domain("empty system".into()));
    }
    if let Some(l) = lm.iter().find(|l| !(**l < 0.0)) {
        return Err(Error::Domain(format!("modulus e^{l} is not below 1")));
    }
    if lm.len() == 1 {
        return Ok(MoranRoot {
            dimension: 0.0,
            saturated: true,
        });
    }
    let p = |d: f64| pressure_from_log_moduli(lm, d);
    if p(MORAN_HI) > 0.0 {
        return Ok(MoranRoot {
            dimension: MORAN_HI,
            saturated: true,
        });
    }
    let (mut lo, mut hi) = (MORAN_LO, MORAN_HI);
    for _ in 0..MORAN_ITERS {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(MoranRoot {
        dimension: 0.5 * (lo + hi),
        saturated: false,
    })
}

/// `I_p = -Σ p_j log p_j`.
pub fn entropy(p: &ProbabilityVector) -> f64 {
    -p.0.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>()
}

/// `Λ_p(λ) = -Σ p_j log r_j(λ)` with branches continued from `λ = 0`.
pub fn lyapunov(sys: &MovedSystem, p: &ProbabilityVector, lambda: Complex64) -> Result<Complex64> {
    if p.len() != sys.len() {
        return Err(Error::Domain(format!("{} probabilities for {} entries", p.len(), sys.len())));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &pj) in p.0.iter().enumerate() {
        if pj > 0.0 {
            acc -= sys.log_radius(j, lambda)? * pj;
        }
    }
    Ok(acc)
}

/// `p_j ∝ |r_j(λ)|^d`, the distribution with `I_p - d Re Λ_p(λ) = P_λ(d)`.
pub fn maximizer_at(sys: &MovedSystem, lambda: Complex64, d: f64) -> Result<ProbabilityVector> {
    let lm = log_moduli(sys, lambda)?;
    let m = lm.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(d * b));
    ProbabilityVector::from_weights(&lm.iter().map(|l| (d * l - m).exp()).collect::<Vec<_>>())
}

/// [`maximizer_at`] at `λ = 0`.
pub fn maximizer(sys: &MovedSystem, delta: f64) -> Result<ProbabilityVector> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta = {delta} is outside (0, 1]")));
    }
    maximizer_at(sys, Complex64::new(0.0, 0.0), delta)
}

/// `Φ(λ) = 1 - I_p / Λ_p(λ)`.
pub fn phi(sys: &MovedSystem, p: &ProbabilityVector, lambda: Complex64) -> Result<Complex64> {
    let l = lyapunov(sys, p, lambda)?;
    if l.norm() == 0.0 {
        return Err(Error::Singular(format!("Lyapunov exponent vanishes at lambda = {lambda}")));
    }
    Ok(1.0 - entropy(p) / l)
}

/// Sampled `d`-grid of the pressure at `λ`.
pub fn pressure_curve(sys: &MovedSystem, lambda: Complex64, ds: &[f64]) -> Result<Vec<(f64, f64)>> {
    ds.iter().map(|&d| Ok((d, pressure(sys, lambda, d)?))).collect()
}

/// `λ = ρ (i - 1/2)/radii · e^{2πi j/angles}`.
pub fn polar_lambda_grid(rho: f64, radii: usize, angles: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(radii * angles);
    for i in 1..=radii {
        let r = rho * (i as f64 - 0.5) / radii as f64;
        for j in 0..angles {
            out.push(Complex64::from_polar(r, 2.0 * PI * j as f64 / angles as f64));
        }
    }
    out
}
