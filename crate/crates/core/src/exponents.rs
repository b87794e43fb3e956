//! Complex stretching exponents `log(f(x+t) - f(x)) / log t` along the real line.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::geometry::{branch_log, general_diameter, theorem_disk, Disk};
use crate::maps::{PlanarMap, Provenance};

pub const DEFAULT_T0: f64 = 0.1;
pub const DEFAULT_Q: f64 = 0.7;
pub const DEFAULT_DEPTH: usize = 60;
pub const DEFAULT_TAIL: usize = 10;
pub const DEFAULT_MERGE_RADIUS: f64 = 0.02;
pub const DEFAULT_VERDICT_TOL: f64 = 0.05;
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-3;
pub const MORI_SLACK: f64 = 0.1;

/// Geometric grid `t_i = t0·q^i`, `i = 0..=depth`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceParams {
    pub t0: f64,
    pub q: f64,
    pub depth: usize,
}

impl Default for TraceParams {
    fn default() -> Self {
        Self {
            t0: DEFAULT_T0,
            q: DEFAULT_Q,
            depth: DEFAULT_DEPTH,
        }
    }
}

impl TraceParams {
    pub fn validate(&self) -> Result<()> {
        finite(self.t0, "t0")?;
        finite(self.q, "q")?;
        if !(self.t0 > 0.0 && self.t0 < 1.0) {
            return Err(Error::Domain(format!("t0 = {} is outside (0, 1)", self.t0)));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::Domain(format!("q = {} is outside (0, 1)", self.q)));
        }
        if self.depth == 0 {
            return Err(Error::Domain("depth must be positive".into()));
        }
        Ok(())
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..=self.depth).map(|i| self.t0 * self.q.powi(i as i32)).collect()
    }

    pub fn smallest_t(&self) -> f64 {
        self.t0 * self.q.powi(self.depth as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentTrace {
    pub x: f64,
    pub params: TraceParams,
    pub provenance: Provenance,
    pub ts: Vec<f64>,
    /// Branch-tracked `log(f(x+t_i) - f(x))`.
    pub logs: Vec<Complex64>,
    pub quotients: Vec<Complex64>,
}

impl ExponentTrace {
    /// A trace holding only the first `depth + 1` samples.
    pub fn truncated(&self, depth: usize) -> Self {
        let m = (depth + 1).min(self.ts.len());
        Self {
            x: self.x,
            params: TraceParams { depth, ..self.params },
            provenance: self.provenance,
            ts: self.ts[..m].to_vec(),
            logs: self.logs[..m].to_vec(),
            quotients: self.quotients[..m].to_vec(),
        }
    }

    fn tail(&self, tail: usize) -> Result<&[Complex64]> {
        if tail == 0 || tail > self.quotients.len() {
            return Err(Error::Domain(format!(
                "tail {tail} must lie in 1..={}",
                self.quotients.len()
            )));
        }
        Ok(&self.quotients[self.quotients.len() - tail..])
    }
}

pub fn trace_exponents(f: &dyn PlanarMap, x: f64, params: TraceParams) -> Result<ExponentTrace> {
    params.validate()?;
    let x = finite(x, "x")?;
    let floor = f.resolution_floor();
    if params.smallest_t() < floor {
        return Err(Error::Precondition(format!(
            "smallest t = {:e} is below the map's resolution floor {floor:e}",
            params.smallest_t()
        )));
    }
    let ts = params.ts();
    let fx = f.eval(Complex64::new(x, 0.0))?;
    let mut diffs = Vec::with_capacity(ts.len());
    for &t in &ts {
        let d = f.eval(Complex64::new(x + t, 0.0))? - fx;
        if d.norm() == 0.0 {
            return Err(Error::Injectivity(t));
        }
        diffs.push(d);
    }
    let logs: Vec<Complex64> = branch_log(&ts, &diffs)?.values().collect();
    let quotients = logs.iter().zip(&ts).map(|(l, t)| l / t.ln()).collect();
    Ok(ExponentTrace {
        x,
        params,
        provenance: f.provenance(),
        ts,
        logs,
        quotients,
    })
}

/// Single-linkage clusters of `values` with the given merge radius; returns
/// cluster means ordered by first appearance.
pub fn cluster(values: &[Complex64], merge_radius: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= merge_radius {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut sums: Vec<(usize, Complex64, usize)> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let r = root(&mut parent, i);
        match sums.iter_mut().find(|(id, _, _)| *id == r) {
            Some(entry) => {
                entry.1 += v;
                entry.2 += 1;
            }
            None => sums.push((r, *v, 1)),
        }
    }
    sums.into_iter().map(|(_, s, c)| s / c as f64).collect()
}

/// Cluster centers of the last `tail` quotients.
pub fn accumulation_estimate(trace: &ExponentTrace, tail: usize, merge_radius: f64) -> Result<Vec<Complex64>> {
    Ok(cluster(trace.tail(tail)?, merge_radius))
}

/// Hausdorff distance between the clusters at full depth and at half depth.
pub fn cluster_drift(trace: &ExponentTrace, tail: usize, merge_radius: f64) -> Result<f64> {
    let full = accumulation_estimate(trace, tail, merge_radius)?;
    let half = accumulation_estimate(&trace.truncated(trace.params.depth / 2), tail, merge_radius)?;
    let one_way = |a: &[Complex64], b: &[Complex64]| {
        a.iter()
            .map(|p| b.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(one_way(&full, &half).max(one_way(&half, &full)))
}

/// Largest `|arg(f(x+t) - f(x))| / |log|f(x+t) - f(x)||` over the tail.
pub fn rotation_rate(trace: &ExponentTrace, tail: usize) -> Result<f64> {
    if tail == 0 || tail > trace.logs.len() {
        return Err(Error::Domain(format!("tail {tail} must lie in 1..={}", trace.logs.len())));
    }
    trace.logs[trace.logs.len() - tail..]
        .iter()
        .filter(|l| l.re != 0.0)
        .map(|l| l.im.abs() / l.re.abs())
        .reduce(f64::max)
        .ok_or_else(|| Error::Singular("every tail sample has |f(x+t) - f(x)| = 1".into()))
}

/// Whether the trailing real parts lie in `[1/K - slack, K + slack]`.
pub fn mori_check(trace: &ExponentTrace, k: f64, tail: usize, slack: f64) -> Result<bool> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("k = {k} is outside [0, 1)")));
    }
    let big_k = (1.0 + k) / (1.0 - k);
    Ok(trace
        .tail(tail)?
        .iter()
        .all(|w| w.re >= 1.0 / big_k - slack && w.re <= big_k + slack))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerdictParams {
    pub trace: TraceParams,
    pub tail: usize,
    pub merge_radius: f64,
    /// A cluster counts as inside when its distance to the disk is at most this.
    pub tolerance: f64,
    /// Points closer than this to the map's exceptional set are reported, not judged.
    pub exclusion_radius: f64,
}

impl Default for VerdictParams {
    fn default() -> Self {
        Self {
            trace: TraceParams::default(),
            tail: DEFAULT_TAIL,
            merge_radius: DEFAULT_MERGE_RADIUS,
            tolerance: DEFAULT_VERDICT_TOL,
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskVerdict {
    pub x: f64,
    pub clusters: Vec<Complex64>,
    /// Largest cluster distance to the theorem disk.
    pub distance: f64,
    pub inside: bool,
    /// Same against the weaker `s = 1` disk.
    pub weak_distance: f64,
    pub weak_inside: bool,
    pub rotation: f64,
    pub drift: f64,
    pub exceptional: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub x: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub k: f64,
    pub disk: Disk,
    pub weak_disk: Disk,
    pub verdicts: Vec<DiskVerdict>,
    pub skipped: Vec<SkippedPoint>,
    /// Fraction of judged (non-exceptional, non-skipped) points with every cluster inside.
    pub inside_fraction: f64,
    pub weak_inside_fraction: f64,
    pub judged: usize,
}

fn judge(f: &dyn PlanarMap, x: f64, disk: &Disk, weak: &Disk, p: &VerdictParams) -> Result<DiskVerdict> {
    let trace = trace_exponents(f, x, p.trace)?;
    let clusters = accumulation_estimate(&trace, p.tail, p.merge_radius)?;
    let distance = clusters.iter().map(|&c| disk.distance(c)).fold(0.0, f64::max);
    let weak_distance = clusters.iter().map(|&c| weak.distance(c)).fold(0.0, f64::max);
    let exceptional = f.exceptional_set().distance(Complex64::new(x, 0.0)) < p.exclusion_radius;
    Ok(DiskVerdict {
        x,
        clusters,
        distance,
        inside: distance <= p.tolerance,
        weak_distance,
        weak_inside: weak_distance <= p.tolerance,
        rotation: rotation_rate(&trace, p.tail).unwrap_or(f64::NAN),
        drift: cluster_drift(&trace, p.tail, p.merge_radius)?,
        exceptional,
    })
}

/// Trace every `x` and compare its clusters with `theorem_disk(k)` and the
/// `s = 1` disk. Points run in parallel; results keep input order.
pub fn disk_verdict(f: &dyn PlanarMap, k: f64, xs: &[f64], params: &VerdictParams) -> Result<VerdictReport> {
    params.trace.validate()?;
    let disk = theorem_disk(k)?;
    let weak = Disk::from_real_diameter(general_diameter(1.0, k)?);
    let results: Vec<(f64, Result<DiskVerdict>)> = xs
        .par_iter()
        .map(|&x| (x, judge(f, x, &disk, &weak, params)))
        .collect();
    let mut verdicts = Vec::new();
    let mut skipped = Vec::new();
    for (x, r) in results {
        match r {
            Ok(v) => verdicts.push(v),
            Err(e) => skipped.push(SkippedPoint {
                x,
                reason: e.to_string(),
            }),
        }
    }
    let judged: Vec<&DiskVerdict> = verdicts.iter().filter(|v| !v.exceptional).collect();
    let frac = |pred: fn(&DiskVerdict) -> bool| {
        if judged.is_empty() {
            f64::NAN
        } else {
            judged.iter().filter(|v| pred(v)).count() as f64 / judged.len() as f64
        }
    };
    Ok(VerdictReport {
        k,
        disk,
        weak_disk: weak,
        inside_fraction: frac(|v| v.inside),
        weak_inside_fraction: frac(|v| v.weak_inside),
        judged: judged.len(),
        verdicts,
        skipped,
    })
}
