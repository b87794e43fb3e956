//! Closed-form quasiconformal model maps and their Beltrami coefficients.

mod radial;
mod spiral;

pub use radial::{annular_compose, AnnulusBlock, RadialMap, RadialProfile};
pub use spiral::{spiral_beltrami, spiral_eval, spiral_motion, SpiralMap};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::solver::{SolverGrid, SolverSolution};

/// Where a map's values come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Solver,
}

/// Points and circles where a map is not smooth. Exponent estimates there are
/// not expected to obey the almost-everywhere bounds.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExceptionalSet {
    pub points: Vec<Complex64>,
    pub circles: Vec<(Complex64, f64)>,
}

impl ExceptionalSet {
    pub fn distance(&self, z: Complex64) -> f64 {
        let p = self.points.iter().map(|&c| (z - c).norm());
        let c = self
            .circles
            .iter()
            .map(|&(c, r)| ((z - c).norm() - r).abs());
        p.chain(c).fold(f64::INFINITY, f64::min)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.circles.is_empty()
    }
}

/// An evaluable quasiconformal map of the plane.
pub trait PlanarMap: Send + Sync {
    fn eval(&self, z: Complex64) -> Result<Complex64>;

    /// Upper bound `k` for `|μ|`.
    fn norm_bound(&self) -> f64;

    fn provenance(&self) -> Provenance;

    fn exceptional_set(&self) -> ExceptionalSet {
        ExceptionalSet::default()
    }

    /// Smallest scale at which values are trustworthy (zero for closed forms).
    fn resolution_floor(&self) -> f64 {
        0.0
    }
}

impl<M: PlanarMap + ?Sized> PlanarMap for Arc<M> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        (**self).eval(z)
    }
    fn norm_bound(&self) -> f64 {
        (**self).norm_bound()
    }
    fn provenance(&self) -> Provenance {
        (**self).provenance()
    }
    fn exceptional_set(&self) -> ExceptionalSet {
        (**self).exceptional_set()
    }
    fn resolution_floor(&self) -> f64 {
        (**self).resolution_floor()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Identity;

impl PlanarMap for Identity {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(z)
    }
    fn norm_bound(&self) -> f64 {
        0.0
    }
    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm
    }
}

/// `w ↦ (w - f(0)) / (f(1) - f(0))` applied after `inner`; the Beltrami
/// coefficient is unchanged.
#[derive(Clone, Debug)]
pub struct Normalized<M> {
    inner: M,
    f0: Complex64,
    scale: Complex64,
}

impl<M: PlanarMap> Normalized<M> {
    pub fn new(inner: M) -> Result<Self> {
        let f0 = inner.eval(Complex64::new(0.0, 0.0))?;
        let f1 = inner.eval(Complex64::new(1.0, 0.0))?;
        let scale = f1 - f0;
        if scale.norm() == 0.0 {
            return Err(Error::Construction("f(1) = f(0); cannot normalize".into()));
        }
        Ok(Self { inner, f0, scale })
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }
}

impl<M: PlanarMap> PlanarMap for Normalized<M> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let w = self.inner.eval(z)?;
        if self.f0 == Complex64::new(0.0, 0.0) && self.scale == Complex64::new(1.0, 0.0) {
            return Ok(w);
        }
        Ok((w - self.f0) / self.scale)
    }
    fn norm_bound(&self) -> f64 {
        self.inner.norm_bound()
    }
    fn provenance(&self) -> Provenance {
        self.inner.provenance()
    }
    fn exceptional_set(&self) -> ExceptionalSet {
        self.inner.exceptional_set()
    }
    fn resolution_floor(&self) -> f64 {
        self.inner.resolution_floor()
    }
}

/// The globally constant-coefficient map `(z + c z̄) / (1 + c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineBeltrami {
    c: Complex64,
}

impl AffineBeltrami {
    pub fn new(c: Complex64) -> Result<Self> {
        if c.norm() >= 1.0 {
            return Err(Error::NotQuasiconformal(c.norm()));
        }
        Ok(Self { c })
    }

    pub fn coefficient(&self) -> Complex64 {
        self.c
    }
}

impl PlanarMap for AffineBeltrami {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok((z + self.c * z.conj()) / (1.0 + self.c))
    }
    fn norm_bound(&self) -> f64 {
        self.c.norm()
    }
    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm
    }
}

/// A Beltrami coefficient `μ`, closed-form or sampled on a grid.
#[derive(Clone, Debug)]
pub enum BeltramiField {
    Zero,
    Constant(Complex64),
    /// `m (z - c) / conj(z - c)` on the whole plane.
    Spiral { m: Complex64, center: Complex64 },
    /// `m_j (z - c) / conj(z - c)` on each annulus `inner_j ≤ |z - c| ≤ outer_j`.
    Annular {
        center: Complex64,
        blocks: Vec<(f64, f64, Complex64)>,
    },
    /// Smooth radial bump `peak · β(|z - c|) (z - c)/conj(z - c)` supported in `(inner, outer)`.
    SmoothAnnulus {
        center: Complex64,
        inner: f64,
        outer: f64,
        peak: Complex64,
    },
    Grid(Arc<SolverGrid>),
}

impl BeltramiField {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let rot = |c: Complex64| {
            let d = z - c;
            if d.norm() == 0.0 {
                None
            } else {
                Some(d / d.conj())
            }
        };
        match self {
            Self::Zero => zero,
            Self::Constant(c) => *c,
            Self::Spiral { m, center } => rot(*center).map_or(zero, |u| m * u),
            Self::Annular { center, blocks } => {
                let r = (z - center).norm();
                blocks
                    .iter()
                    .find(|(a, b, _)| *a <= r && r <= *b)
                    .and_then(|(_, _, m)| rot(*center).map(|u| m * u))
                    .unwrap_or(zero)
            }
            Self::SmoothAnnulus {
                center,
                inner,
                outer,
                peak,
            } => {
                let r = (z - center).norm();
                let b = radial::bump((r - inner) / (outer - inner));
                if b == 0.0 {
                    zero
                } else {
                    rot(*center).map_or(zero, |u| peak * b * u)
                }
            }
            Self::Grid(g) => g.nearest(z),
        }
    }

    pub fn norm_bound(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant(c) => c.norm(),
            Self::Spiral { m, .. } => m.norm(),
            Self::Annular { blocks, .. } => blocks.iter().map(|b| b.2.norm()).fold(0.0, f64::max),
            Self::SmoothAnnulus { peak, .. } => peak.norm(),
            Self::Grid(g) => g.norm_bound(),
        }
    }

    /// `factor · μ`, the coefficient of the motion at `λ` when `factor = λ/k`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        match self {
            Self::Zero => Self::Zero,
            Self::Constant(c) => Self::Constant(c * factor),
            Self::Spiral { m, center } => Self::Spiral {
                m: m * factor,
                center: *center,
            },
            Self::Annular { center, blocks } => Self::Annular {
                center: *center,
                blocks: blocks.iter().map(|&(a, b, m)| (a, b, m * factor)).collect(),
            },
            Self::SmoothAnnulus {
                center,
                inner,
                outer,
                peak,
            } => Self::SmoothAnnulus {
                center: *center,
                inner: *inner,
                outer: *outer,
                peak: peak * factor,
            },
            Self::Grid(g) => Self::Grid(Arc::new(g.scaled(factor))),
        }
    }

    /// The closed-form map solving the Beltrami equation for this coefficient,
    /// normalized to fix 0 and 1, when one is available.
    pub fn closed_form_map(&self) -> Result<Option<Arc<dyn PlanarMap>>> {
        let map: Arc<dyn PlanarMap> = match self {
            Self::Zero => Arc::new(Identity),
            Self::Constant(c) => Arc::new(AffineBeltrami::new(*c)?),
            Self::Spiral { m, center } => {
                let tau = (1.0 + m) / (1.0 - m);
                Arc::new(SpiralMap::new(tau, Complex64::new(1.0, 0.0), *center)?.normalized()?)
            }
            Self::Annular { center, blocks } => {
                let blocks = blocks
                    .iter()
                    .map(|&(inner, outer, m)| AnnulusBlock {
                        inner,
                        outer,
                        tau: (1.0 + m) / (1.0 - m),
                    })
                    .collect();
                Arc::new(annular_compose(*center, blocks)?)
            }
            Self::SmoothAnnulus {
                center,
                inner,
                outer,
                peak,
            } => Arc::new(Normalized::new(RadialMap::smooth(*center, *inner, *outer, *peak)?)?),
            Self::Grid(_) => return Ok(None),
        };
        Ok(Some(map))
    }
}

/// A solver output evaluated as a planar map.
#[derive(Clone, Debug)]
pub struct SolverMap {
    solution: Arc<SolverSolution>,
}

impl SolverMap {
    pub fn new(solution: Arc<SolverSolution>) -> Self {
        Self { solution }
    }

    pub fn solution(&self) -> &SolverSolution {
        &self.solution
    }
}

impl PlanarMap for SolverMap {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.solution.evaluate_map(z)
    }
    fn norm_bound(&self) -> f64 {
        self.solution.norm_bound()
    }
    fn provenance(&self) -> Provenance {
        Provenance::Solver
    }
    fn resolution_floor(&self) -> f64 {
        10.0 * self.solution.cell()
    }
}

/// Central-difference Wirtinger derivatives `(f_z, f_z̄)` at `z` with step `h`.
pub fn fd_derivatives(f: &dyn PlanarMap, z: Complex64, h: f64) -> Result<(Complex64, Complex64)> {
    let i = Complex64::new(0.0, 1.0);
    let fx = (f.eval(z + h)? - f.eval(z - h)?) / (2.0 * h);
    let fy = (f.eval(z + i * h)? - f.eval(z - i * h)?) / (2.0 * h);
    Ok(((fx - i * fy) * 0.5, (fx + i * fy) * 0.5))
}

/// Finite-difference estimate of `μ = f_z̄ / f_z`.
pub fn fd_beltrami(f: &dyn PlanarMap, z: Complex64, h: f64) -> Result<Complex64> {
    let (fz, fzb) = fd_derivatives(f, z, h)?;
    if fz.norm() == 0.0 {
        return Err(Error::Singular(format!("f_z vanishes at {z}")));
    }
    Ok(fzb / fz)
}

/// `max(|f(0)|, |f(1) - 1|)`.
pub fn normalization_error(f: &dyn PlanarMap) -> Result<f64> {
    let e0 = f.eval(Complex64::new(0.0, 0.0))?.norm();
    let e1 = (f.eval(Complex64::new(1.0, 0.0))? - 1.0).norm();
    Ok(e0.max(e1))
}

/// Empirical weak-quasisymmetry constant: the largest
/// `|f(x) - f(z)| / |f(y) - f(z)|` over random triples in the disk of radius
/// `radius` with `|x - z| ≤ |y - z|`.
pub fn quasisymmetry_constant<R: Rng>(
    f: &dyn PlanarMap,
    radius: f64,
    triples: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut best: f64 = 1.0;
    let sample = |rng: &mut R| loop {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() < 1.0 {
            return z * radius;
        }
    };
    for _ in 0..triples {
        let z = sample(rng);
        let mut x = sample(rng);
        let mut y = sample(rng);
        if (x - z).norm() > (y - z).norm() {
            std::mem::swap(&mut x, &mut y);
        }
        let fz = f.eval(z)?;
        let den = (f.eval(y)? - fz).norm();
        if den == 0.0 {
            continue;
        }
        best = best.max((f.eval(x)? - fz).norm() / den);
    }
    Ok(best)
}
