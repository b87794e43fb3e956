use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use super::MovedSystem;
use crate::error::{finite_c, Error, Result};
use crate::maps::PlanarMap;

/// Largest attractor sample generated by [`ifs_attractor`].
pub const MAX_ATTRACTOR_POINTS: usize = 1 << 22;
pub const MIN_BOX_POINTS: usize = 1000;
pub const MIN_BOX_SCALES: usize = 4;

/// Similarities `γ_j(z) = r_j z + w_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IfsSystem {
    maps: Vec<(Complex64, Complex64)>,
}

impl IfsSystem {
    pub fn new(maps: Vec<(Complex64, Complex64)>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Domain("IFS has no maps".into()));
        }
        for (j, &(r, w)) in maps.iter().enumerate() {
            finite_c(r, "IFS ratio")?;
            finite_c(w, "IFS translation")?;
            if r.norm() >= 1.0 {
                return Err(Error::Domain(format!("map {j} is not a contraction: |r| = {}", r.norm())));
            }
        }
        Ok(Self { maps })
    }

    /// `γ_j(z) = r_j(λ) z + a φ_λ(x_j)`. Fails when the images of 𝔻 are not
    /// pairwise disjoint.
    pub fn from_moved(sys: &MovedSystem, lambda: Complex64) -> Result<Self> {
        let maps = (0..sys.len())
            .map(|j| Ok((sys.radius(j, lambda)?, sys.center(j, lambda)?)))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..maps.len() {
            for j in i + 1..maps.len() {
                let gap = (maps[i].1 - maps[j].1).norm() - maps[i].0.norm() - maps[j].0.norm();
                if gap <= 0.0 {
                    return Err(Error::Domain(format!("images of maps {i} and {j} overlap")));
                }
            }
        }
        Self::new(maps)
    }

    pub fn maps(&self) -> &[(Complex64, Complex64)] {
        &self.maps
    }

    pub fn contraction(&self) -> f64 {
        self.maps.iter().map(|m| m.0.norm()).fold(0.0, f64::max)
    }

    /// Radius of a disk about 0 containing the attractor.
    pub fn attractor_radius(&self) -> f64 {
        let w = self.maps.iter().map(|m| m.1.norm()).fold(0.0, f64::max);
        w / (1.0 - self.contraction())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attractor {
    pub depth: usize,
    pub points: Vec<Complex64>,
    /// Hausdorff distance bound to the true attractor.
    pub hausdorff_bound: f64,
}

/// `{γ_w(0) : |w| = depth}` in lexicographic word order.
pub fn ifs_attractor(ifs: &IfsSystem, depth: usize) -> Result<Attractor> {
    if depth == 0 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    let n = ifs.maps.len();
    let total = (n as f64).powi(depth as i32);
    if total > MAX_ATTRACTOR_POINTS as f64 {
        return Err(Error::Domain(format!("{n}^{depth} points exceed the sample limit")));
    }
    // γ_{w_1} ∘ ... ∘ γ_{w_d}(0): apply the innermost map first
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    for _ in 0..depth {
        pts = ifs
            .maps
            .iter()
            .flat_map(|&(r, w)| pts.iter().map(move |&p| r * p + w))
            .collect();
    }
    Ok(Attractor {
        depth,
        points: pts,
        hausdorff_bound: ifs.contraction().powi(depth as i32) * ifs.attractor_radius(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDimension {
    pub dimension: f64,
    /// `(ε, N(ε))` per scale.
    pub counts: Vec<(f64, usize)>,
    pub degenerate: bool,
}

/// `ε_i = D·2^{-(coarsest + i)}`, `D` the bounding-box side of `points`.
pub fn dyadic_scales(points: &[Complex64], coarsest: u32, count: usize) -> Vec<f64> {
    let (lo, hi) = bounds(points);
    let side = (hi.re - lo.re).max(hi.im - lo.im);
    (0..count)
        .map(|i| side * 0.5f64.powi((coarsest as usize + i) as i32))
        .collect()
}

fn bounds(points: &[Complex64]) -> (Complex64, Complex64) {
    points.iter().fold(
        (
            Complex64::new(f64::INFINITY, f64::INFINITY),
            Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), p| {
            (
                Complex64::new(lo.re.min(p.re), lo.im.min(p.im)),
                Complex64::new(hi.re.max(p.re), hi.im.max(p.im)),
            )
        },
    )
}

/// Least-squares slope of `log N(ε)` against `log(1/ε)`, boxes anchored at
/// the lower-left corner of the bounding box.
pub fn box_dimension(points: &[Complex64], scales: &[f64]) -> Result<BoxDimension> {
    if points.len() < MIN_BOX_POINTS {
        return Err(Error::Precondition(format!(
            "{} points, at least {MIN_BOX_POINTS} required",
            points.len()
        )));
    }
    if scales.len() < MIN_BOX_SCALES {
        return Err(Error::Precondition(format!(
            "{} scales, at least {MIN_BOX_SCALES} required",
            scales.len()
        )));
    }
    for p in points {
        finite_c(*p, "point")?;
    }
    let (lo, hi) = bounds(points);
    if lo == hi {
        return Ok(BoxDimension {
            dimension: 0.0,
            counts: scales.iter().map(|&e| (e, 1)).collect(),
            degenerate: true,
        });
    }
    for &e in scales {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::Domain(format!("scale {e} must be positive")));
        }
    }
    let counts: Vec<(f64, usize)> = scales
        .par_iter()
        .map(|&eps| {
            // the far edge of the bounding box belongs to the last box, not a new one
            let last = |extent: f64| ((extent / eps).ceil() as i64 - 1).max(0);
            let (lx, ly) = (last(hi.re - lo.re), last(hi.im - lo.im));
            let boxes: HashSet<(i64, i64)> = points
                .iter()
                .map(|p| {
                    (
                        (((p.re - lo.re) / eps).floor() as i64).min(lx),
                        (((p.im - lo.im) / eps).floor() as i64).min(ly),
                    )
                })
                .collect();
            (eps, boxes.len())
        })
        .collect();
    let xs: Vec<f64> = counts.iter().map(|c| -c.0.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (c.1 as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("scales must be distinct".into()));
    }
    Ok(BoxDimension {
        dimension: sxy / sxx,
        counts,
        degenerate: false,
    })
}

/// Deterministic samples of a subset of the real line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSampler {
    /// Midpoints of `n` equal cells of `[a, b]`.
    Segment { a: f64, b: f64 },
    /// Smith-Volterra-Cantor set on `[a, b]`: stage `n` removes the middle
    /// `4^{-n}(b - a)` of each remaining interval. Positive measure.
    FatCantor { a: f64, b: f64, depth: usize },
}

impl SetSampler {
    fn intervals(&self) -> Result<Vec<(f64, f64)>> {
        let (a, b) = match *self {
            Self::Segment { a, b } | Self::FatCantor { a, b, .. } => (a, b),
        };
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
        }
        let mut iv = vec![(a, b)];
        if let Self::FatCantor { depth, .. } = *self {
            if depth > 20 {
                return Err(Error::Domain(format!("fat Cantor depth {depth} exceeds 20")));
            }
            for stage in 1..=depth {
                let gap = (b - a) * 0.25f64.powi(stage as i32);
                iv = iv
                    .into_iter()
                    .flat_map(|(l, r)| {
                        let m = 0.5 * (l + r);
                        [(l, m - 0.5 * gap), (m + 0.5 * gap, r)]
                    })
                    .collect();
            }
        }
        Ok(iv)
    }

    /// `n` points spread over the set proportionally to length.
    pub fn sample(&self, n: usize) -> Result<Vec<f64>> {
        let iv = self.intervals()?;
        let total: f64 = iv.iter().map(|(l, r)| r - l).sum();
        Ok((0..n)
            .map(|i| {
                let mut u = (i as f64 + 0.5) / n as f64 * total;
                for &(l, r) in &iv {
                    if u <= r - l {
                        return l + u;
                    }
                    u -= r - l;
                }
                iv.last().map_or(0.0, |&(_, r)| r)
            })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub k: f64,
    pub points: usize,
    pub estimate: BoxDimension,
    /// `1 - k²`.
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

pub const DIMENSION_SLACK: f64 = 0.05;

/// Box dimension of `f(A)` for a sample of `A`, judged against `1 - k²`.
pub fn image_dimension_experiment(
    f: &dyn PlanarMap,
    k: f64,
    sampler: &SetSampler,
    points: usize,
    coarsest: u32,
    scales: usize,
) -> Result<DimensionReport> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("k = {k} is outside [0, 1)")));
    }
    let xs = sampler.sample(points)?;
    let image = xs
        .par_iter()
        .map(|&x| f.eval(Complex64::new(x, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let eps = dyadic_scales(&image, coarsest, scales);
    let estimate = box_dimension(&image, &eps)?;
    let bound = 1.0 - k * k;
    Ok(DimensionReport {
        k,
        points,
        pass: estimate.dimension >= bound - DIMENSION_SLACK,
        estimate,
        bound,
        slack: DIMENSION_SLACK,
    })
}
