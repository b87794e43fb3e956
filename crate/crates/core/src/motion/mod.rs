//! Holomorphic motions `λ ↦ φ_λ` with `μ_λ = λμ/k`, holomorphy diagnostics,
//! and the Schwarz-lemma mechanism behind the exponent bound.

mod holo;
mod lemma;

pub use holo::{holomorphy_diagnostic, sample_circle, HoloReport, HoloSample, DEFAULT_HOLO_TOL};
pub use lemma::{
    constraint_holds, lemma31_experiment, schwarz_check, Lemma31Params, Lemma31Row, Lemma31Table, SchwarzStatus,
    SchwarzVerdict, VERIFICATION_RADII,
};

use num_complex::Complex64;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::error::{finite, finite_c, Error, Result};
use crate::maps::{AffineBeltrami, Identity, Normalized, PlanarMap, RadialMap, SolverMap, SpiralMap};
use crate::solver::{solve_principal, SolverGrid, SolverSolution};

/// Default solver λ-cache: 64 radii on each of 8 rays.
pub const DEFAULT_RAYS: usize = 8;
pub const DEFAULT_PER_RAY: usize = 64;

#[derive(Clone)]
pub enum MotionBackend {
    Identity,
    Affine(Complex64),
    Spiral(SpiralMap),
    Radial(RadialMap),
    Solver(SolverCache),
}

/// Solutions for `λμ/k` at a fixed set of `λ`.
#[derive(Clone)]
pub struct SolverCache {
    base: Arc<SolverGrid>,
    entries: Vec<(Complex64, Arc<SolverSolution>)>,
}

impl SolverCache {
    pub fn lambdas(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn get(&self, lambda: Complex64) -> Option<&Arc<SolverSolution>> {
        self.entries.iter().find(|e| e.0 == lambda).map(|e| &e.1)
    }

    pub fn base(&self) -> &SolverGrid {
        &self.base
    }
}

impl fmt::Debug for MotionBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "Identity"),
            Self::Affine(c) => write!(f, "Affine({c})"),
            Self::Spiral(s) => write!(f, "Spiral({s:?})"),
            Self::Radial(r) => write!(f, "Radial({r:?})"),
            Self::Solver(c) => write!(f, "Solver({} cached)", c.entries.len()),
        }
    }
}

/// The family `φ_λ` solving `f_z̄ = (λμ/k) f_z`, normalized to fix 0 and 1,
/// for `|λ| < ρ` with `k < ρ < 1`.
#[derive(Clone, Debug)]
pub struct MotionFamily {
    backend: MotionBackend,
    k: f64,
    rho: f64,
}

fn check_rho(k: f64, rho: f64) -> Result<()> {
    let rho = finite(rho, "rho")?;
    if !(k < rho && rho < 1.0) {
        return Err(Error::Domain(format!("need k < rho < 1, got k = {k}, rho = {rho}")));
    }
    Ok(())
}

impl MotionFamily {
    pub fn identity(rho: f64) -> Result<Self> {
        check_rho(0.0, rho)?;
        Ok(Self {
            backend: MotionBackend::Identity,
            k: 0.0,
            rho,
        })
    }

    pub fn affine(c: Complex64, rho: f64) -> Result<Self> {
        let k = AffineBeltrami::new(c)?.norm_bound();
        check_rho(k, rho)?;
        Ok(Self {
            backend: MotionBackend::Affine(c),
            k,
            rho,
        })
    }

    pub fn spiral(map: SpiralMap, rho: f64) -> Result<Self> {
        let k = map.m().norm();
        if k >= 1.0 {
            return Err(Error::NotQuasiconformal(k));
        }
        check_rho(k, rho)?;
        Ok(Self {
            backend: MotionBackend::Spiral(map),
            k,
            rho,
        })
    }

    pub fn radial(map: RadialMap, rho: f64) -> Result<Self> {
        let k = map.norm_bound();
        check_rho(k, rho)?;
        Ok(Self {
            backend: MotionBackend::Radial(map),
            k,
            rho,
        })
    }

    /// Solve once per `λ` in `lambdas`; later evaluations at other `λ` fail.
    pub fn solver(base: SolverGrid, rho: f64, lambdas: &[Complex64], tol: f64) -> Result<Self> {
        let k = base.norm_bound();
        check_rho(k, rho)?;
        let base = Arc::new(base);
        let mut entries: Vec<(Complex64, Arc<SolverSolution>)> = Vec::new();
        for &l in lambdas {
            let l = finite_c(l, "lambda")?;
            if l.norm() >= rho {
                return Err(Error::Domain(format!("lambda {l} is outside the disk of radius {rho}")));
            }
            if entries.iter().any(|e| e.0 == l) {
                continue;
            }
            let grid = if k == 0.0 { (*base).clone() } else { base.scaled(l / k) };
            entries.push((l, Arc::new(solve_principal(Arc::new(grid), tol)?)));
        }
        Ok(Self {
            backend: MotionBackend::Solver(SolverCache { base, entries }),
            k,
            rho,
        })
    }

    pub fn backend(&self) -> &MotionBackend {
        &self.backend
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn factor(&self, lambda: Complex64) -> Complex64 {
        if self.k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            lambda / self.k
        }
    }

    /// The normalized map `φ_λ`.
    pub fn map_at(&self, lambda: Complex64) -> Result<Arc<dyn PlanarMap>> {
        let lambda = finite_c(lambda, "lambda")?;
        if lambda.norm() >= 1.0 {
            return Err(Error::Domain(format!("|lambda| = {} is not below 1", lambda.norm())));
        }
        Ok(match &self.backend {
            MotionBackend::Identity => Arc::new(Identity),
            MotionBackend::Affine(c) => Arc::new(AffineBeltrami::new(c * self.factor(lambda))?),
            MotionBackend::Spiral(s) => Arc::new(Normalized::new(s.motion(self.k, lambda)?)?),
            MotionBackend::Radial(r) => Arc::new(Normalized::new(r.motion(self.k, lambda)?)?),
            MotionBackend::Solver(cache) => {
                let sol = cache.get(lambda).ok_or(Error::CacheMiss(lambda))?;
                Arc::new(SolverMap::new(sol.clone()))
            }
        })
    }

    /// `φ_λ(z)`.
    pub fn eval(&self, lambda: Complex64, z: Complex64) -> Result<Complex64> {
        self.map_at(lambda)?.eval(z)
    }

    /// Cached `λ` on the ray through `λ` up to `|λ|`, ordered outward; `None`
    /// for closed-form backends.
    pub fn ray_path(&self, lambda: Complex64) -> Option<Vec<Complex64>> {
        let MotionBackend::Solver(cache) = &self.backend else {
            return None;
        };
        let mut path: Vec<Complex64> = cache
            .lambdas()
            .filter(|l| {
                l.norm() > 0.0 && l.norm() <= lambda.norm() && (l.arg() - lambda.arg()).abs() < 1e-12
            })
            .collect();
        path.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        if path.last() != Some(&lambda) {
            path.push(lambda);
        }
        Some(path)
    }
}

/// `φ_λ(z)` for the family.
pub fn motion_eval(family: &MotionFamily, lambda: Complex64, z: Complex64) -> Result<Complex64> {
    family.eval(lambda, z)
}

/// `λ = r_max·i/per_ray · e^{2πij/rays}` for `i = 1..=per_ray`, plus `λ = 0`.
pub fn radial_lambda_grid(r_max: f64, rays: usize, per_ray: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for j in 0..rays {
        let u = Complex64::from_polar(1.0, TAU * j as f64 / rays as f64);
        for i in 1..=per_ray {
            out.push(u * (r_max * i as f64 / per_ray as f64));
        }
    }
    out
}
