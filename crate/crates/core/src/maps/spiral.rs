use num_complex::Complex64;

use super::{BeltramiField, ExceptionalSet, Normalized, PlanarMap, Provenance};
use crate::error::{finite_c, Error, Result};

/// The complex power map `z₀ + ω (z - z₀)/|z - z₀| · |z - z₀|^τ` with
/// `τ = α(1 + iγ)`.
///
/// The raw map sends the center to itself; use [`SpiralMap::normalized`] for
/// the version fixing 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpiralMap {
    tau: Complex64,
    omega: Complex64,
    center: Complex64,
}

impl SpiralMap {
    pub fn new(tau: Complex64, omega: Complex64, center: Complex64) -> Result<Self> {
        let tau = finite_c(tau, "tau")?;
        let omega = finite_c(omega, "omega")?;
        let center = finite_c(center, "center")?;
        if tau.re <= 0.0 {
            return Err(Error::Domain(format!("Re(tau) = {} must be positive", tau.re)));
        }
        if omega.norm() == 0.0 {
            return Err(Error::Domain("omega must be nonzero".into()));
        }
        Ok(Self { tau, omega, center })
    }

    /// Stretching `α` and rotation `γ` with `τ = α(1 + iγ)`.
    pub fn from_alpha_gamma(alpha: f64, gamma: f64) -> Result<Self> {
        Self::new(
            Complex64::new(alpha, alpha * gamma),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    /// `m = (τ - 1)/(τ + 1)`, the constant in `μ = m (z - z₀)/conj(z - z₀)`.
    pub fn m(&self) -> Complex64 {
        (self.tau - 1.0) / (self.tau + 1.0)
    }

    pub fn normalized(self) -> Result<Normalized<Self>> {
        Normalized::new(self)
    }

    pub fn motion(&self, k: f64, lambda: Complex64) -> Result<Self> {
        spiral_motion(self, k, lambda)
    }
}

impl PlanarMap for SpiralMap {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        spiral_eval(self, z)
    }
    fn norm_bound(&self) -> f64 {
        self.m().norm()
    }
    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm
    }
    fn exceptional_set(&self) -> ExceptionalSet {
        ExceptionalSet {
            points: vec![self.center],
            circles: Vec::new(),
        }
    }
}

pub fn spiral_eval(map: &SpiralMap, z: Complex64) -> Result<Complex64> {
    let z = finite_c(z, "z")?;
    let d = z - map.center;
    let r = d.norm();
    if r == 0.0 {
        // Re(τ) > 0 is a constructor invariant, so the map extends continuously.
        return Ok(map.center);
    }
    let power = (map.tau * r.ln()).exp();
    Ok(map.center + map.omega * (d / r) * power)
}

pub fn spiral_beltrami(map: &SpiralMap) -> Result<BeltramiField> {
    let m = map.m();
    if m.norm() >= 1.0 {
        return Err(Error::NotQuasiconformal(m.norm()));
    }
    Ok(if m.norm() == 0.0 {
        BeltramiField::Zero
    } else {
        BeltramiField::Spiral {
            m,
            center: map.center,
        }
    })
}

/// The spiral whose coefficient is `λμ/k`: `τ(λ) = (1 + mλ/k)/(1 - mλ/k)`.
pub fn spiral_motion(map: &SpiralMap, k: f64, lambda: Complex64) -> Result<SpiralMap> {
    let lambda = finite_c(lambda, "lambda")?;
    let m = map.m();
    if !(k.is_finite() && (0.0..1.0).contains(&k)) {
        return Err(Error::Domain(format!("k = {k} is outside [0, 1)")));
    }
    if m.norm() > k * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "|m| = {} exceeds the normalizing k = {k}",
            m.norm()
        )));
    }
    if lambda.norm() >= 1.0 {
        return Err(Error::Domain(format!("|lambda| = {} is not below 1", lambda.norm())));
    }
    let w = if k == 0.0 { Complex64::new(0.0, 0.0) } else { m * lambda / k };
    if w.norm() >= 1.0 {
        return Err(Error::DegenerateMotion(w.norm()));
    }
    SpiralMap::new((1.0 + w) / (1.0 - w), map.omega, map.center)
}
