//! One driver per experiment. Each writes its files into the output
//! directory and returns their names with a verdict summary.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use qcspectra::exponents::{disk_verdict, trace_exponents};
use qcspectra::geometry::rotation_bound;
use qcspectra::motion::{
    holomorphy_diagnostic, lemma31_experiment, sample_circle, schwarz_check, Lemma31Params, DEFAULT_HOLO_TOL,
};
use qcspectra::solver::{solve_principal, write_samples, GridSidecar};
use qcspectra::thermo::{
    apu_check, entropy, ifs_attractor, image_dimension_experiment, lyapunov, maximizer, moran_dimension, phi,
    polar_lambda_grid, pressure_curve, techni_check, IfsSystem, MovedSystem, RadiiSource, SetSampler,
};

use crate::config::{Grid1, MapDescriptor, RadiiDescriptor, RunConfig, SystemDescriptor};
use crate::error::{CliError, CliResult};

/// Slack on the rotation bound used for the per-point verdict.
pub const ROTATION_SLACK: f64 = 0.05;
/// Holomorphy tolerance for solver-backed families.
pub const SOLVER_HOLO_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    Exponents,
    Pressure,
    Dimension,
    Lemma31,
    Motion,
    Solve,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exponents => "exponents",
            Self::Pressure => "pressure",
            Self::Dimension => "dimension",
            Self::Lemma31 => "lemma31",
            Self::Motion => "motion",
            Self::Solve => "solve",
        }
    }
}

pub struct Outcome {
    pub files: Vec<String>,
    pub summary: Value,
}

fn origin() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn write_file(dir: &Path, name: &str, data: &[u8]) -> CliResult<String> {
    let path = dir.join(name);
    std::fs::write(&path, data).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    Ok(name.to_string())
}

fn write_json(dir: &Path, name: &str, value: &Value) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(dir, name, text.as_bytes())
}

pub fn run_experiment(exp: Experiment, cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    if let Some(name) = &cfg.experiment {
        if name != exp.name() {
            return Err(CliError::Config(format!(
                "config is for `{name}`, not `{}`",
                exp.name()
            )));
        }
    }
    match exp {
        Experiment::Exponents => cmd_exponents(cfg, dir),
        Experiment::Pressure => cmd_pressure(cfg, dir),
        Experiment::Dimension => cmd_dimension(cfg, dir),
        Experiment::Lemma31 => cmd_lemma31(cfg, dir),
        Experiment::Motion => cmd_motion(cfg, dir),
        Experiment::Solve => cmd_solve(cfg, dir),
    }
}

pub fn cmd_exponents(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let desc = cfg.require_map()?;
    let built = desc.build()?;
    let k = cfg.resolve_k(built.k)?;
    let xs = cfg
        .xs
        .clone()
        .unwrap_or(Grid1::Linspace {
            start: 0.05,
            end: 2.0,
            count: 200,
        })
        .values()?;
    let params = cfg.verdict;
    let report = disk_verdict(&*built.map, k, &xs, &params)?;

    let traces: Vec<_> = xs
        .par_iter()
        .map(|&x| trace_exponents(&*built.map, x, params.trace).ok())
        .collect();
    let mut csv = String::from("x,i,t,log_re,log_im,quotient_re,quotient_im\n");
    for tr in traces.iter().flatten() {
        for (i, ((t, l), q)) in tr.ts.iter().zip(&tr.logs).zip(&tr.quotients).enumerate() {
            writeln!(csv, "{},{},{},{},{},{},{}", tr.x, i, t, l.re, l.im, q.re, q.im).expect("string write");
        }
    }

    let bound = rotation_bound(k)?;
    let judged: Vec<_> = report.verdicts.iter().filter(|v| !v.exceptional).collect();
    let max_rotation = judged.iter().map(|v| v.rotation).filter(|r| r.is_finite()).fold(0.0, f64::max);
    let rotation_ok = judged.iter().all(|v| v.rotation.is_finite() && v.rotation <= bound + ROTATION_SLACK);
    let verdicts = json!({
        "map": desc,
        "k": k,
        "params": params,
        "report": report,
        "rotation_bound": bound,
        "rotation_slack": ROTATION_SLACK,
        "max_rotation": max_rotation,
        "rotation_ok": rotation_ok,
    });
    let files = vec![
        write_file(dir, "traces.csv", csv.as_bytes())?,
        write_json(dir, "verdicts.json", &verdicts)?,
    ];
    Ok(Outcome {
        files,
        summary: json!({
            "inside_fraction": report.inside_fraction,
            "weak_inside_fraction": report.weak_inside_fraction,
            "judged": report.judged,
            "skipped": report.skipped.len(),
            "rotation_ok": rotation_ok,
        }),
    })
}

/// The moved system described by `system` and `radii`; `lambdas` are the
/// parameters a solver-backed family must cache.
fn moved_system(cfg: &RunConfig, lambdas: &[Complex64]) -> CliResult<MovedSystem> {
    let base = cfg
        .system
        .clone()
        .ok_or_else(|| CliError::Config("`system` is required".into()))?
        .build()?;
    let source = match cfg.radii.clone().unwrap_or(RadiiDescriptor::Stationary) {
        RadiiDescriptor::Stationary => RadiiSource::Stationary,
        RadiiDescriptor::IdealizedSpiral { m } => {
            let k = cfg.k.unwrap_or(m.norm());
            if m.norm() > k * (1.0 + 1e-12) || k >= 1.0 {
                return Err(CliError::Config(format!("|m| = {} must not exceed k = {k} < 1", m.norm())));
            }
            RadiiSource::IdealizedSpiral { m, k }
        }
        RadiiDescriptor::Motion => {
            let fam = cfg.require_map()?.motion(cfg.require_rho()?, lambdas)?;
            RadiiSource::Motion(Arc::new(fam))
        }
    };
    Ok(MovedSystem::new(base, source))
}

pub fn cmd_pressure(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let grid = cfg.rho.map(|rho| polar_lambda_grid(rho, cfg.lambda_grid.radii, cfg.lambda_grid.angles));
    let mut cached = grid.clone().unwrap_or_default();
    if let Some(k) = cfg.k {
        cached.push(Complex64::new(k, 0.0));
    }
    let sys = moved_system(cfg, &cached)?;
    let ds = cfg
        .d_grid
        .clone()
        .unwrap_or(Grid1::Linspace {
            start: 0.05,
            end: 2.0,
            count: 40,
        })
        .values()?;
    let root = moran_dimension(&sys, origin())?;
    let curve: Vec<Value> = pressure_curve(&sys, origin(), &ds)?
        .into_iter()
        .map(|(d, p)| json!({"d": d, "pressure": p}))
        .collect();
    let delta = cfg.delta.unwrap_or(root.dimension.min(1.0));
    let p = maximizer(&sys, delta)?;
    let phi0 = phi(&sys, &p, origin())?;
    let apu = match (cfg.rho, &grid) {
        (Some(rho), Some(g)) => Some(apu_check(&sys, &p, rho, g)?),
        _ => None,
    };
    let techni = match (cfg.k, cfg.rho) {
        (Some(k), Some(rho)) => Some(match techni_check(&sys, k, rho, delta, cfg.r_term.unwrap_or(0.0)) {
            Ok(r) => serde_json::to_value(r)?,
            Err(e) => json!({"error": e.to_string()}),
        }),
        _ => None,
    };
    let out = json!({
        "system": sys.base(),
        "radii": cfg.radii.clone().unwrap_or(RadiiDescriptor::Stationary),
        "moran_root": root,
        "pressure_curve": curve,
        "delta": delta,
        "p": p.values(),
        "entropy": entropy(&p),
        "lyapunov_0": lyapunov(&sys, &p, origin())?,
        "phi_0": phi0,
        "phi_0_expected": 1.0 - delta,
        "apu": apu,
        "techni": techni,
    });
    let files = vec![write_json(dir, "pressure.json", &out)?];
    Ok(Outcome {
        files,
        summary: json!({
            "moran_root": root.dimension,
            "delta": delta,
            "apu_violations": apu.as_ref().map(|a| a.violations),
            "apu_worst_margin": apu.as_ref().map(|a| a.worst_margin),
            "techni_inside": techni.as_ref().and_then(|t| t.get("inside").cloned()),
        }),
    })
}

pub fn cmd_dimension(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let desc = cfg.require_map()?;
    let built = desc.build()?;
    let k = cfg.resolve_k(built.k)?;
    let sampler = cfg.sampler.clone().unwrap_or(SetSampler::Segment { a: 0.0, b: 1.0 });
    let report = image_dimension_experiment(
        &*built.map,
        k,
        &sampler,
        cfg.points.unwrap_or(100_000),
        cfg.coarsest.unwrap_or(4),
        cfg.scales.unwrap_or(6),
    )?;
    let out = json!({"map": desc, "sampler": sampler, "report": report});
    let files = vec![write_json(dir, "dimension.json", &out)?];
    Ok(Outcome {
        files,
        summary: json!({
            "estimate": report.estimate.dimension,
            "bound": report.bound,
            "pass": report.pass,
        }),
    })
}

pub fn cmd_lemma31(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let s = &cfg.lemma31;
    let params = Lemma31Params {
        epsilons: s.epsilons.clone(),
        k: cfg.k.unwrap_or(0.5),
        candidates: s.candidates,
        seed: cfg.seed,
        envelope_factor: s.envelope_factor,
    };
    let table = lemma31_experiment(&params).map_err(|e| CliError::Config(e.to_string()))?;
    let mut csv = String::from("epsilon,candidates,accepted,max_abs,source,envelope,within_envelope,inconclusive\n");
    for r in &table.rows {
        let max = r.max_abs.map_or(String::new(), |v| v.to_string());
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.epsilon, r.candidates, r.accepted, max, r.source, r.envelope, r.within_envelope, r.inconclusive
        )
        .expect("string write");
    }
    let witness = schwarz_check(&|z| z * z, params.k)?;
    let files = vec![write_file(dir, "lemma31.csv", csv.as_bytes())?];
    Ok(Outcome {
        files,
        summary: json!({
            "monotone": table.monotone,
            "witness_found": table.witness_found,
            "within_envelope": table.rows.iter().all(|r| r.within_envelope),
            "schwarz_witness": witness,
        }),
    })
}

fn default_probes() -> Vec<Complex64> {
    vec![Complex64::new(0.5, 0.25), Complex64::new(-0.4, 0.3), Complex64::new(1.5, -0.2)]
}

fn circle_lambdas(radius: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(radius, std::f64::consts::TAU * j as f64 / n as f64))
        .collect()
}

pub fn cmd_motion(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let desc = cfg.require_map()?;
    let rho = cfg.require_rho()?;
    let grid = polar_lambda_grid(rho, cfg.lambda_grid.radii, cfg.lambda_grid.angles);
    let n = cfg.circle_points.unwrap_or(64);
    let radius = 0.5 * rho;
    let attractor_lambda = cfg.attractor_lambda.unwrap_or(Complex64::new(radius, 0.0));
    if attractor_lambda.norm() >= rho {
        return Err(CliError::Config("attractor_lambda must lie inside the rho-disk".into()));
    }
    let mut cached = vec![origin()];
    cached.extend(circle_lambdas(radius, n));
    cached.extend(grid.iter().copied());
    cached.push(attractor_lambda);
    let fam = Arc::new(desc.motion(rho, &cached)?);
    let tol = if matches!(desc, MapDescriptor::Solver { .. }) {
        SOLVER_HOLO_TOL
    } else {
        DEFAULT_HOLO_TOL
    };

    let probes = cfg.probes.clone().unwrap_or_else(default_probes);
    let holo = probes
        .par_iter()
        .map(|&z| {
            let s = sample_circle(|l| fam.eval(l, z), origin(), radius, n)?;
            Ok(json!({"z": z, "report": holomorphy_diagnostic(&s, tol)?}))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let holomorphic = holo.iter().all(|h| h["report"]["holomorphic"] == Value::Bool(true));

    let sys = MovedSystem::new(
        cfg.system
            .clone()
            .unwrap_or(SystemDescriptor::Moduli {
                moduli: vec![1.0 / 3.0, 1.0 / 3.0],
            })
            .build()?,
        RadiiSource::Motion(fam.clone()),
    );
    let root = moran_dimension(&sys, origin())?;
    let delta = cfg.delta.unwrap_or(root.dimension.min(1.0));
    let p = maximizer(&sys, delta)?;
    let apu = apu_check(&sys, &p, rho, &grid)?;

    // a moved system whose images overlap has no IFS attractor; that is a result, not a failure
    let mut csv = String::from("index,re,im\n");
    let attractor = match IfsSystem::from_moved(&sys, attractor_lambda) {
        Ok(ifs) => {
            let att = ifs_attractor(&ifs, cfg.attractor_depth.unwrap_or(10))?;
            for (i, z) in att.points.iter().enumerate() {
                writeln!(csv, "{i},{},{}", z.re, z.im).expect("string write");
            }
            json!({
                "lambda": attractor_lambda,
                "depth": att.depth,
                "points": att.points.len(),
                "hausdorff_bound": att.hausdorff_bound,
                "contraction": ifs.contraction(),
            })
        }
        Err(e @ qcspectra::Error::Domain(_)) => json!({"lambda": attractor_lambda, "error": e.to_string()}),
        Err(e) => return Err(e.into()),
    };

    let out = json!({
        "map": desc,
        "k": fam.k(),
        "rho": rho,
        "holomorphy_radius": radius,
        "holomorphy_tol": tol,
        "holomorphy": holo,
        "delta": delta,
        "apu": apu,
        "attractor": attractor,
    });
    let files = vec![
        write_json(dir, "motion.json", &out)?,
        write_file(dir, "attractor.csv", csv.as_bytes())?,
    ];
    Ok(Outcome {
        files,
        summary: json!({
            "holomorphic": holomorphic,
            "apu_violations": apu.violations,
            "apu_worst_margin": apu.worst_margin,
        }),
    })
}

fn default_solve_probes(limit: f64) -> Vec<Complex64> {
    let m = 21;
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let s = |v: usize| limit * (2.0 * v as f64 / (m - 1) as f64 - 1.0);
            out.push(Complex64::new(s(j), s(i)));
        }
    }
    out
}

pub fn cmd_solve(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let desc = cfg.require_map()?;
    let MapDescriptor::Solver { field, .. } = desc else {
        return Err(CliError::Config("solve needs a `solver` map descriptor".into()));
    };
    let (grid, settings) = desc.solver_grid()?.expect("solver descriptor");
    let grid = Arc::new(grid);
    let sol = solve_principal(grid.clone(), settings.tol)?;

    grid.write(&dir.join("mu.bin"), &dir.join("mu.json"))?;
    let h = sol.density();
    write_samples(&dir.join("h.bin"), h)?;
    let h_meta = GridSidecar {
        k: h.iter().map(|v| v.norm()).fold(0.0, f64::max),
        ..grid.sidecar()
    };
    write_json(dir, "h.json", &serde_json::to_value(h_meta)?)?;

    let closed = field.build().ok().map(|b| b.map);
    let limit = sol.interior_half_width().min(2.0);
    let probes = cfg.probes.clone().unwrap_or_else(|| default_solve_probes(limit));
    let rows = probes
        .par_iter()
        .map(|&z| {
            let f = sol.evaluate_map(z)?;
            let exact = closed.as_ref().map(|m| m.eval(z)).transpose()?;
            Ok((z, f, exact))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let sup_error = closed.as_ref().map(|_| {
        rows.iter()
            .filter_map(|(_, f, e)| e.map(|e| (f - e).norm()))
            .fold(0.0, f64::max)
    });
    let samples: Vec<Value> = rows
        .iter()
        .map(|(z, f, e)| json!({"z": z, "f": f, "closed_form": e}))
        .collect();
    let out = json!({
        "map": desc,
        "n": settings.n,
        "half_width": settings.half_width,
        "supersample": settings.supersample,
        "tol": settings.tol,
        "k": grid.norm_bound(),
        "iterations": sol.iterations(),
        "residual": sol.residual(),
        "residual_history": sol.residual_history(),
        "convergence_ratio": sol.convergence_ratio(),
        "interior_half_width": sol.interior_half_width(),
        "sup_error": sup_error,
        "samples": samples,
    });
    let files = vec![
        "mu.bin".to_string(),
        "mu.json".to_string(),
        "h.bin".to_string(),
        "h.json".to_string(),
        write_json(dir, "solve.json", &out)?,
    ];
    Ok(Outcome {
        files,
        summary: json!({
            "iterations": sol.iterations(),
            "residual": sol.residual(),
            "convergence_ratio": sol.convergence_ratio(),
            "sup_error": sup_error,
        }),
    })
}
