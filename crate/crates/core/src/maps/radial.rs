use num_complex::Complex64;

use super::{BeltramiField, ExceptionalSet, Normalized, PlanarMap, Provenance};
use crate::error::{finite, finite_c, Error, Result};

/// One annulus `inner ≤ |z - c| ≤ outer` on which the map spirals with exponent `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusBlock {
    pub inner: f64,
    pub outer: f64,
    pub tau: Complex64,
}

impl AnnulusBlock {
    pub fn m(&self) -> Complex64 {
        (self.tau - 1.0) / (self.tau + 1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RadialProfile {
    /// Piecewise constant exponents on disjoint annuli, sorted outward.
    Blocks(Vec<AnnulusBlock>),
    /// `m(r) = peak · β((r - inner)/(outer - inner))` with a `C^∞` bump `β` of height 1.
    Bump { inner: f64, outer: f64, peak: Complex64 },
}

/// `f(z) = c + (z - c)/|z - c| · exp(L(|z - c|))` with `L'(r) = τ(r)/r` and
/// `L(r) = log r` outside the outermost radius, so `f` is the identity there.
/// Its Beltrami coefficient is `m(r) (z - c)/conj(z - c)` with `m = (τ - 1)/(τ + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialMap {
    center: Complex64,
    profile: RadialProfile,
}

pub(crate) fn bump(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (4.0 - 1.0 / (x * (1.0 - x))).exp()
    }
}

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];
const PANELS: usize = 32;

/// Composite 8-point Gauss-Legendre rule on `[a, b]`.
fn integrate(a: f64, b: f64, f: impl Fn(f64) -> Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let w = (b - a) / PANELS as f64;
    for p in 0..PANELS {
        let mid = a + (p as f64 + 0.5) * w;
        let half = 0.5 * w;
        for (x, wt) in GL_NODES.iter().zip(GL_WEIGHTS) {
            acc += (f(mid - half * x) + f(mid + half * x)) * (wt * half);
        }
    }
    acc
}

fn validate_m(m: Complex64) -> Result<()> {
    let m = finite_c(m, "beltrami coefficient")?;
    if m.norm() >= 1.0 {
        return Err(Error::NotQuasiconformal(m.norm()));
    }
    Ok(())
}

impl RadialMap {
    pub fn blocks(center: Complex64, blocks: Vec<AnnulusBlock>) -> Result<Self> {
        let center = finite_c(center, "center")?;
        for (j, b) in blocks.iter().enumerate() {
            finite(b.inner, "annulus radius")?;
            finite(b.outer, "annulus radius")?;
            finite_c(b.tau, "tau")?;
            if !(b.inner > 0.0 && b.inner < b.outer) {
                return Err(Error::Domain(format!(
                    "annulus {j} needs 0 < inner < outer, got [{}, {}]",
                    b.inner, b.outer
                )));
            }
            if b.tau.re <= 0.0 {
                return Err(Error::Domain(format!("annulus {j}: Re(tau) must be positive")));
            }
            validate_m(b.m())?;
        }
        let mut sorted = blocks;
        sorted.sort_by(|a, b| a.inner.total_cmp(&b.inner));
        for w in sorted.windows(2) {
            if w[0].outer > w[1].inner {
                return Err(Error::Domain(format!(
                    "annuli [{}, {}] and [{}, {}] overlap",
                    w[0].inner, w[0].outer, w[1].inner, w[1].outer
                )));
            }
        }
        let map = Self {
            center,
            profile: RadialProfile::Blocks(sorted),
        };
        map.check_matching()?;
        Ok(map)
    }

    pub fn smooth(center: Complex64, inner: f64, outer: f64, peak: Complex64) -> Result<Self> {
        let center = finite_c(center, "center")?;
        finite(inner, "annulus radius")?;
        finite(outer, "annulus radius")?;
        if !(inner >= 0.0 && inner < outer) {
            return Err(Error::Domain(format!("need 0 <= inner < outer, got [{inner}, {outer}]")));
        }
        validate_m(peak)?;
        Ok(Self {
            center,
            profile: RadialProfile::Bump { inner, outer, peak },
        })
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    fn outer_radius(&self) -> f64 {
        match &self.profile {
            RadialProfile::Blocks(b) => b.last().map_or(0.0, |b| b.outer),
            RadialProfile::Bump { outer, .. } => *outer,
        }
    }

    /// `τ(r)` of the profile.
    pub fn tau_at(&self, r: f64) -> Complex64 {
        let m = self.m_at(r);
        (1.0 + m) / (1.0 - m)
    }

    pub fn m_at(&self, r: f64) -> Complex64 {
        match &self.profile {
            RadialProfile::Blocks(blocks) => blocks
                .iter()
                .find(|b| b.inner <= r && r <= b.outer)
                .map_or(Complex64::new(0.0, 0.0), AnnulusBlock::m),
            RadialProfile::Bump { inner, outer, peak } => peak * bump((r - inner) / (outer - inner)),
        }
    }

    /// `L(r)`, the complex logarithm of the radial profile.
    pub fn log_profile(&self, r: f64) -> Complex64 {
        let lr = Complex64::new(r.ln(), 0.0);
        match &self.profile {
            RadialProfile::Blocks(blocks) => {
                let mut shift = Complex64::new(0.0, 0.0);
                for b in blocks.iter().filter(|b| r < b.outer) {
                    shift += (b.tau - 1.0) * (b.outer.ln() - b.inner.max(r).ln());
                }
                lr - shift
            }
            RadialProfile::Bump { inner, outer, peak } => {
                if r >= *outer {
                    return lr;
                }
                let lo = inner.max(r);
                if lo <= 0.0 {
                    return lr;
                }
                let width = outer - inner;
                let shift = integrate(lo.ln(), outer.ln(), |u| {
                    let m = peak * bump((u.exp() - inner) / width);
                    // τ - 1 = 2m / (1 - m)
                    2.0 * m / (1.0 - m)
                });
                lr - shift
            }
        }
    }

    fn check_matching(&self) -> Result<()> {
        let RadialProfile::Blocks(blocks) = &self.profile else {
            return Ok(());
        };
        for b in blocks {
            for rho in [b.inner, b.outer] {
                let lo = self.log_profile(rho * (1.0 - 1e-13));
                let hi = self.log_profile(rho * (1.0 + 1e-13));
                let gap = (lo - hi).norm();
                if !(gap < 1e-9) {
                    return Err(Error::Construction(format!(
                        "boundary values at radius {rho} differ by {gap:e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The radial map with coefficient `λμ/k`: every block exponent (or the
    /// bump height) is scaled by `λ/k`.
    pub fn motion(&self, k: f64, lambda: Complex64) -> Result<Self> {
        let lambda = finite_c(lambda, "lambda")?;
        if !(k.is_finite() && (0.0..1.0).contains(&k)) {
            return Err(Error::Domain(format!("k = {k} is outside [0, 1)")));
        }
        if self.norm_bound() > k * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "norm bound {} exceeds the normalizing k = {k}",
                self.norm_bound()
            )));
        }
        if lambda.norm() >= 1.0 {
            return Err(Error::Domain(format!("|lambda| = {} is not below 1", lambda.norm())));
        }
        let factor = if k == 0.0 { Complex64::new(0.0, 0.0) } else { lambda / k };
        let scale = |m: Complex64| -> Result<Complex64> {
            let w = m * factor;
            if w.norm() >= 1.0 {
                return Err(Error::DegenerateMotion(w.norm()));
            }
            Ok(w)
        };
        match &self.profile {
            RadialProfile::Blocks(blocks) => {
                let moved = blocks
                    .iter()
                    .map(|b| {
                        let w = scale(b.m())?;
                        Ok(AnnulusBlock {
                            tau: (1.0 + w) / (1.0 - w),
                            ..*b
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::blocks(self.center, moved)
            }
            RadialProfile::Bump { inner, outer, peak } => {
                Self::smooth(self.center, *inner, *outer, scale(*peak)?)
            }
        }
    }

    pub fn beltrami(&self) -> BeltramiField {
        match &self.profile {
            RadialProfile::Blocks(blocks) => BeltramiField::Annular {
                center: self.center,
                blocks: blocks.iter().map(|b| (b.inner, b.outer, b.m())).collect(),
            },
            RadialProfile::Bump { inner, outer, peak } => BeltramiField::SmoothAnnulus {
                center: self.center,
                inner: *inner,
                outer: *outer,
                peak: *peak,
            },
        }
    }

    pub fn normalized(self) -> Result<Normalized<Self>> {
        Normalized::new(self)
    }
}

impl PlanarMap for RadialMap {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let z = finite_c(z, "z")?;
        let d = z - self.center;
        let r = d.norm();
        if r == 0.0 {
            return Ok(self.center);
        }
        if r >= self.outer_radius() {
            return Ok(z);
        }
        Ok(self.center + (d / r) * self.log_profile(r).exp())
    }

    fn norm_bound(&self) -> f64 {
        match &self.profile {
            RadialProfile::Blocks(b) => b.iter().map(|b| b.m().norm()).fold(0.0, f64::max),
            RadialProfile::Bump { peak, .. } => peak.norm(),
        }
    }

    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm
    }

    fn exceptional_set(&self) -> ExceptionalSet {
        let circles = match &self.profile {
            RadialProfile::Blocks(blocks) => blocks
                .iter()
                .filter(|b| b.m().norm() > 0.0)
                .flat_map(|b| [(self.center, b.inner), (self.center, b.outer)])
                .collect(),
            RadialProfile::Bump { .. } => Vec::new(),
        };
        ExceptionalSet {
            points: Vec::new(),
            circles,
        }
    }
}

/// Radially piecewise spiral map, the identity outside the outermost annulus,
/// normalized to fix 0 and 1.
pub fn annular_compose(center: Complex64, blocks: Vec<AnnulusBlock>) -> Result<Normalized<RadialMap>> {
    RadialMap::blocks(center, blocks)?.normalized()
}
