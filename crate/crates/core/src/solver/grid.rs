use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{finite, finite_c, Error, Result};
use crate::maps::BeltramiField;

/// `n × n` samples of `μ` at the lattice points `-B + (i, j)·2B/n` of the box
/// `[-B, B)²`, row-major with rows indexed by `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverGrid {
    n: usize,
    half_width: f64,
    samples: Vec<Complex64>,
    k: f64,
}

/// JSON sidecar written next to the binary sample file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSidecar {
    pub n: usize,
    #[serde(rename = "box")]
    pub bounds: [f64; 2],
    pub k: f64,
}

impl SolverGrid {
    pub fn new(n: usize, half_width: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !n.is_power_of_two() || n < 8 {
            return Err(Error::Domain(format!("grid size {n} must be a power of two >= 8")));
        }
        let half_width = finite(half_width, "box half-width")?;
        if half_width <= 0.0 {
            return Err(Error::Domain("box half-width must be positive".into()));
        }
        if samples.len() != n * n {
            return Err(Error::Domain(format!(
                "expected {} samples, got {}",
                n * n,
                samples.len()
            )));
        }
        let mut k: f64 = 0.0;
        for &s in &samples {
            k = k.max(finite_c(s, "grid sample")?.norm());
        }
        if k >= 1.0 {
            return Err(Error::NotQuasiconformal(k));
        }
        Ok(Self {
            n,
            half_width,
            samples,
            k,
        })
    }

    /// Rasterize `field`, averaging `supersample²` sub-cell points per cell so
    /// that jump discontinuities are area weighted.
    pub fn from_field(field: &BeltramiField, n: usize, half_width: f64, supersample: usize) -> Result<Self> {
        if let BeltramiField::Constant(c) = field {
            return Self::constant(n, half_width, *c);
        }
        if let BeltramiField::Grid(g) = field {
            if g.n == n && g.half_width == half_width {
                return Ok((**g).clone());
            }
        }
        let ss = supersample.max(1);
        let h = 2.0 * half_width / n as f64;
        let offs: Vec<f64> = (0..ss).map(|a| ((a as f64 + 0.5) / ss as f64 - 0.5) * h).collect();
        let weight = 1.0 / (ss * ss) as f64;
        let mut samples = vec![Complex64::new(0.0, 0.0); n * n];
        samples.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            let y = -half_width + j as f64 * h;
            for (i, v) in row.iter_mut().enumerate() {
                let x = -half_width + i as f64 * h;
                let mut acc = Complex64::new(0.0, 0.0);
                for &oy in &offs {
                    for &ox in &offs {
                        acc += field.eval(Complex64::new(x + ox, y + oy));
                    }
                }
                *v = acc * weight;
            }
        });
        Self::new(n, half_width, samples)
    }

    /// Globally constant coefficient; the periodic solve is exact for it.
    pub fn constant(n: usize, half_width: f64, c: Complex64) -> Result<Self> {
        Self::new(n, half_width, vec![c; n * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn cell(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// `max |μ|` over the samples.
    pub fn norm_bound(&self) -> f64 {
        self.k
    }

    pub fn point(&self, row: usize, col: usize) -> Complex64 {
        let h = self.cell();
        Complex64::new(-self.half_width + col as f64 * h, -self.half_width + row as f64 * h)
    }

    pub fn nearest(&self, z: Complex64) -> Complex64 {
        let h = self.cell();
        let idx = |v: f64| (((v + self.half_width) / h).round().max(0.0) as usize).min(self.n - 1);
        self.samples[idx(z.im) * self.n + idx(z.re)]
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let samples: Vec<Complex64> = self.samples.iter().map(|s| s * factor).collect();
        let k = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
        Self {
            n: self.n,
            half_width: self.half_width,
            samples,
            k,
        }
    }

    pub fn sidecar(&self) -> GridSidecar {
        GridSidecar {
            n: self.n,
            bounds: [-self.half_width, self.half_width],
            k: self.k,
        }
    }

    /// Write little-endian interleaved `(re, im)` doubles plus the JSON sidecar.
    pub fn write(&self, bin: &Path, json: &Path) -> Result<()> {
        write_samples(bin, &self.samples)?;
        let text = serde_json::to_string_pretty(&self.sidecar()).map_err(|e| Error::Format(e.to_string()))?;
        fs::write(json, text + "\n")?;
        Ok(())
    }

    pub fn read(bin: &Path, json: &Path) -> Result<Self> {
        let meta: GridSidecar =
            serde_json::from_str(&fs::read_to_string(json)?).map_err(|e| Error::Format(e.to_string()))?;
        if meta.bounds[0] != -meta.bounds[1] {
            return Err(Error::Format(format!("box {:?} is not centered at 0", meta.bounds)));
        }
        let samples = read_samples(bin, meta.n * meta.n)?;
        let grid = Self::new(meta.n, meta.bounds[1], samples)?;
        if grid.k > meta.k * (1.0 + 1e-12) {
            return Err(Error::Format(format!(
                "samples reach |mu| = {}, above the declared k = {}",
                grid.k, meta.k
            )));
        }
        Ok(grid)
    }
}

pub fn write_samples(path: &Path, samples: &[Complex64]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for s in samples {
        w.write_all(&s.re.to_le_bytes())?;
        w.write_all(&s.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples(path: &Path, count: usize) -> Result<Vec<Complex64>> {
    let bytes = fs::read(path)?;
    if bytes.len() != count * 16 {
        return Err(Error::Format(format!(
            "{} holds {} bytes, expected {}",
            path.display(),
            bytes.len(),
            count * 16
        )));
    }
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8-byte chunk"));
    Ok(bytes
        .chunks_exact(16)
        .map(|c| Complex64::new(f(&c[..8]), f(&c[8..])))
        .collect())
}
