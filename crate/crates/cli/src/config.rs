//! The JSON run configuration and map descriptors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use qcspectra::exponents::VerdictParams;
use qcspectra::maps::{
    annular_compose, AffineBeltrami, AnnulusBlock, BeltramiField, Identity, Normalized, PlanarMap, RadialMap,
    SpiralMap,
};
use qcspectra::motion::MotionFamily;
use qcspectra::solver::{solve_principal, SolverGrid, DEFAULT_HALF_WIDTH, DEFAULT_SUPERSAMPLE, DEFAULT_TOL};
use qcspectra::thermo::{DiskEntry, DiskSystem, SetSampler};

use crate::error::{CliError, CliResult};

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn yes() -> bool {
    true
}

fn default_n() -> usize {
    256
}

fn default_half_width() -> f64 {
    DEFAULT_HALF_WIDTH
}

fn default_supersample() -> usize {
    DEFAULT_SUPERSAMPLE
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// Complex numbers are written as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapDescriptor {
    Identity,
    /// `(z + c z̄)/(1 + c)`.
    Affine { c: Complex64 },
    /// Exactly one of `tau` and `m = (τ-1)/(τ+1)`.
    Spiral {
        #[serde(default)]
        tau: Option<Complex64>,
        #[serde(default)]
        m: Option<Complex64>,
        #[serde(default = "one")]
        omega: Complex64,
        #[serde(default = "zero")]
        center: Complex64,
        #[serde(default = "yes")]
        normalize: bool,
    },
    Annular {
        #[serde(default = "zero")]
        center: Complex64,
        blocks: Vec<BlockDescriptor>,
    },
    Bump {
        #[serde(default = "zero")]
        center: Complex64,
        inner: f64,
        outer: f64,
        peak: Complex64,
    },
    /// The solver applied to the coefficient of a closed-form descriptor.
    Solver {
        field: Box<MapDescriptor>,
        #[serde(default = "default_n")]
        n: usize,
        #[serde(default = "default_half_width")]
        half_width: f64,
        #[serde(default = "default_supersample")]
        supersample: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDescriptor {
    pub inner: f64,
    pub outer: f64,
    #[serde(default)]
    pub tau: Option<Complex64>,
    #[serde(default)]
    pub m: Option<Complex64>,
}

fn tau_of(tau: Option<Complex64>, m: Option<Complex64>) -> CliResult<Complex64> {
    match (tau, m) {
        (Some(t), None) => Ok(t),
        (None, Some(m)) => Ok((1.0 + m) / (1.0 - m)),
        _ => Err(CliError::Config("give exactly one of `tau` and `m`".into())),
    }
}

fn annulus_blocks(blocks: &[BlockDescriptor]) -> CliResult<Vec<AnnulusBlock>> {
    blocks
        .iter()
        .map(|b| {
            Ok(AnnulusBlock {
                inner: b.inner,
                outer: b.outer,
                tau: tau_of(b.tau, b.m)?,
            })
        })
        .collect()
}

/// A descriptor turned into the objects the experiments need.
pub struct BuiltMap {
    pub map: Arc<dyn PlanarMap>,
    pub field: BeltramiField,
    pub k: f64,
}

/// Solver settings carried by a `solver` descriptor.
#[derive(Clone, Copy, Debug)]
pub struct SolverSettings {
    pub n: usize,
    pub half_width: f64,
    pub supersample: usize,
    pub tol: f64,
}

impl MapDescriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Affine { .. } => "affine",
            Self::Spiral { .. } => "spiral",
            Self::Annular { .. } => "annular",
            Self::Bump { .. } => "bump",
            Self::Solver { .. } => "solver",
        }
    }

    fn spiral(&self) -> CliResult<Option<(SpiralMap, bool)>> {
        let Self::Spiral {
            tau,
            m,
            omega,
            center,
            normalize,
        } = self
        else {
            return Ok(None);
        };
        let tau = tau_of(*tau, *m)?;
        let map = SpiralMap::new(tau, *omega, *center).map_err(CliError::Map)?;
        Ok(Some((map, *normalize)))
    }

    fn radial(&self) -> CliResult<Option<RadialMap>> {
        match self {
            Self::Annular { center, blocks } => {
                Ok(Some(RadialMap::blocks(*center, annulus_blocks(blocks)?).map_err(CliError::Map)?))
            }
            Self::Bump {
                center,
                inner,
                outer,
                peak,
            } => Ok(Some(RadialMap::smooth(*center, *inner, *outer, *peak).map_err(CliError::Map)?)),
            _ => Ok(None),
        }
    }

    /// The Beltrami coefficient without building any map.
    pub fn field(&self) -> CliResult<BeltramiField> {
        Ok(match self {
            Self::Identity => BeltramiField::Zero,
            Self::Affine { c } => {
                AffineBeltrami::new(*c).map_err(CliError::Map)?;
                BeltramiField::Constant(*c)
            }
            Self::Spiral { .. } => {
                let (s, _) = self.spiral()?.expect("spiral descriptor");
                BeltramiField::Spiral {
                    m: s.m(),
                    center: s.center(),
                }
            }
            Self::Annular { .. } | Self::Bump { .. } => self.radial()?.expect("radial descriptor").beltrami(),
            Self::Solver { .. } => {
                let (grid, _) = self.solver_grid()?.expect("solver descriptor");
                BeltramiField::Grid(Arc::new(grid))
            }
        })
    }

    /// The sampled coefficient of a `solver` descriptor.
    pub fn solver_grid(&self) -> CliResult<Option<(SolverGrid, SolverSettings)>> {
        let Self::Solver {
            field,
            n,
            half_width,
            supersample,
            tol,
        } = self
        else {
            return Ok(None);
        };
        if matches!(**field, Self::Solver { .. }) {
            return Err(CliError::Config("a solver field must be a closed-form descriptor".into()));
        }
        let settings = SolverSettings {
            n: *n,
            half_width: *half_width,
            supersample: *supersample,
            tol: *tol,
        };
        let grid = SolverGrid::from_field(&field.field()?, *n, *half_width, *supersample).map_err(CliError::Map)?;
        Ok(Some((grid, settings)))
    }

    pub fn build(&self) -> CliResult<BuiltMap> {
        let field = self.field()?;
        let k = field.norm_bound();
        let map: Arc<dyn PlanarMap> = match self {
            Self::Identity => Arc::new(Identity),
            Self::Affine { c } => Arc::new(AffineBeltrami::new(*c).map_err(CliError::Map)?),
            Self::Spiral { .. } => {
                let (s, normalize) = self.spiral()?.expect("spiral descriptor");
                if normalize {
                    Arc::new(Normalized::new(s).map_err(CliError::Map)?)
                } else {
                    Arc::new(s)
                }
            }
            Self::Annular { center, blocks } => {
                Arc::new(annular_compose(*center, annulus_blocks(blocks)?).map_err(CliError::Map)?)
            }
            Self::Bump { .. } => Arc::new(Normalized::new(self.radial()?.expect("radial descriptor")).map_err(CliError::Map)?),
            Self::Solver { tol, .. } => {
                let BeltramiField::Grid(grid) = &field else {
                    unreachable!("solver descriptors sample a grid")
                };
                let sol = solve_principal(grid.clone(), *tol).map_err(CliError::Map)?;
                Arc::new(qcspectra::maps::SolverMap::new(Arc::new(sol)))
            }
        };
        Ok(BuiltMap { map, field, k })
    }

    /// The family `φ_λ` with `μ_λ = λμ/k`. Solver families are solved at `lambdas` only.
    pub fn motion(&self, rho: f64, lambdas: &[Complex64]) -> CliResult<MotionFamily> {
        let fam = match self {
            Self::Identity => MotionFamily::identity(rho),
            Self::Affine { c } => MotionFamily::affine(*c, rho),
            Self::Spiral { .. } => MotionFamily::spiral(self.spiral()?.expect("spiral descriptor").0, rho),
            Self::Annular { .. } | Self::Bump { .. } => {
                MotionFamily::radial(self.radial()?.expect("radial descriptor"), rho)
            }
            Self::Solver { .. } => {
                let (grid, s) = self.solver_grid()?.expect("solver descriptor");
                MotionFamily::solver(grid, rho, lambdas, s.tol)
            }
        };
        fam.map_err(|e| match e {
            qcspectra::Error::Domain(m) => CliError::Config(m),
            e => CliError::Map(e),
        })
    }
}

/// Evenly spaced values including both ends, or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid1 {
    Values(Vec<f64>),
    Linspace { start: f64, end: f64, count: usize },
}

impl Grid1 {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        match *self {
            Self::Values(ref v) => {
                if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                    return Err(CliError::Config("grid values must be finite and non-empty".into()));
                }
                Ok(v.clone())
            }
            Self::Linspace { start, end, count } => {
                if count == 0 || !start.is_finite() || !end.is_finite() {
                    return Err(CliError::Config("linspace needs finite ends and count > 0".into()));
                }
                if count == 1 {
                    return Ok(vec![start]);
                }
                let step = (end - start) / (count - 1) as f64;
                Ok((0..count).map(|i| if i + 1 == count { end } else { start + step * i as f64 }).collect())
            }
        }
    }
}

/// Disks given directly, or built from scaled moduli.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemDescriptor {
    Moduli { moduli: Vec<f64> },
    Disks { disks: Vec<DiskEntry>, a: f64 },
}

impl SystemDescriptor {
    pub fn build(&self) -> CliResult<DiskSystem> {
        match self {
            Self::Moduli { moduli } => DiskSystem::with_moduli(moduli),
            Self::Disks { disks, a } => DiskSystem::new(disks.clone(), *a),
        }
        .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiiDescriptor {
    Stationary,
    IdealizedSpiral { m: Complex64 },
    /// Radii moved by the family of the config's map.
    Motion,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaGrid {
    pub radii: usize,
    pub angles: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self { radii: 20, angles: 40 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lemma31Section {
    pub epsilons: Vec<f64>,
    pub candidates: usize,
    pub envelope_factor: f64,
}

impl Default for Lemma31Section {
    fn default() -> Self {
        let p = qcspectra::motion::Lemma31Params::default();
        Self {
            epsilons: p.epsilons,
            candidates: p.candidates,
            envelope_factor: p.envelope_factor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub experiment: Option<String>,
    pub seed: u64,
    #[serde(default)]
    pub map: Option<MapDescriptor>,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub verdict: VerdictParams,
    #[serde(default)]
    pub xs: Option<Grid1>,
    #[serde(default)]
    pub system: Option<SystemDescriptor>,
    #[serde(default)]
    pub radii: Option<RadiiDescriptor>,
    #[serde(default)]
    pub d_grid: Option<Grid1>,
    #[serde(default)]
    pub r_term: Option<f64>,
    #[serde(default)]
    pub lambda_grid: LambdaGrid,
    #[serde(default)]
    pub probes: Option<Vec<Complex64>>,
    #[serde(default)]
    pub circle_points: Option<usize>,
    #[serde(default)]
    pub attractor_lambda: Option<Complex64>,
    #[serde(default)]
    pub attractor_depth: Option<usize>,
    #[serde(default)]
    pub sampler: Option<SetSampler>,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub coarsest: Option<u32>,
    #[serde(default)]
    pub scales: Option<usize>,
    #[serde(default)]
    pub lemma31: Lemma31Section,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Read a config, applying `key=value` overrides to top-level scalar fields.
/// Values parse as JSON and fall back to plain strings.
pub fn load_config(path: &Path, overrides: &[String]) -> CliResult<(RunConfig, Value)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text, overrides)
}

pub fn parse_config(text: &str, overrides: &[String]) -> CliResult<(RunConfig, Value)> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| CliError::Config("config must be a JSON object".into()))?;
    for o in overrides {
        let (key, raw) = o
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{o}` is not key=value")))?;
        if obj.get(key).is_some_and(|v| v.is_object() || v.is_array()) {
            return Err(CliError::Config(format!("`{key}` is not a scalar field")));
        }
        let v = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        if v.is_object() || v.is_array() {
            return Err(CliError::Config(format!("override for `{key}` is not a scalar")));
        }
        obj.insert(key.to_string(), v);
    }
    let cfg: RunConfig = serde_json::from_value(value.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok((cfg, value))
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if let Some(k) = self.k {
            if !(0.0..1.0).contains(&k) {
                return bad(format!("k = {k} is outside [0, 1)"));
            }
        }
        if let Some(rho) = self.rho {
            if !(rho > 0.0 && rho < 1.0) {
                return bad(format!("rho = {rho} is outside (0, 1)"));
            }
            if let Some(k) = self.k {
                if k >= rho {
                    return bad(format!("need k < rho, got k = {k}, rho = {rho}"));
                }
            }
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d <= 1.0) {
                return bad(format!("delta = {d} is outside (0, 1]"));
            }
        }
        if self.lambda_grid.radii == 0 || self.lambda_grid.angles == 0 {
            return bad("lambda grid needs positive radii and angles".into());
        }
        self.verdict
            .trace
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn require_map(&self) -> CliResult<&MapDescriptor> {
        self.map.as_ref().ok_or_else(|| CliError::Config("`map` is required".into()))
    }

    pub fn require_rho(&self) -> CliResult<f64> {
        self.rho.ok_or_else(|| CliError::Config("`rho` is required".into()))
    }

    /// `k` from the config, or the map's `‖μ‖∞`; a configured `k` below it is rejected.
    pub fn resolve_k(&self, map_k: f64) -> CliResult<f64> {
        match self.k {
            Some(k) if k + 1e-12 < map_k => Err(CliError::Config(format!(
                "k = {k} is below the map's dilatation bound {map_k}"
            ))),
            Some(k) => Ok(k),
            None => Ok(map_k),
        }
    }
}
