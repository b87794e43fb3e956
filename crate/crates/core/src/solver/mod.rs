//! Periodic FFT solver for the principal solution of `f_z̄ = μ f_z`.
//!
//! The density `h = f_z̄` solves `h = μ S h + μ` with the Beurling transform
//! `S` acting as the Fourier multiplier `conj(ζ)/ζ`. The map is recovered as
//! `f = z + C h`, where the Cauchy transform `C` is the multiplier `1/(πiζ)` on
//! the mean-free part and `mean(h)·z̄` on the zero mode.

mod fft;
mod grid;

pub use grid::{read_samples, write_samples, GridSidecar, SolverGrid};

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{finite_c, Error, Result};
use fft::{fftfreq, Fft2};

pub const DEFAULT_N: usize = 1024;
pub const DEFAULT_HALF_WIDTH: f64 = 4.0;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_SUPERSAMPLE: usize = 4;
/// Iterations allowed beyond `ceil(log tol / log k)`.
pub const ITERATION_MARGIN: usize = 10;

/// Cells kept between an evaluation point and the box edge.
const INTERIOR_MARGIN: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct SolverSolution {
    grid: Arc<SolverGrid>,
    h: Vec<Complex64>,
    mean: Complex64,
    /// Periodic part `C(h - mean)` on the lattice.
    periodic: Vec<Complex64>,
    history: Vec<f64>,
    f0: Complex64,
    scale: Complex64,
}

fn multipliers(n: usize, cell: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let freq = fftfreq(n, cell);
    let mut s = vec![Complex64::new(0.0, 0.0); n * n];
    let mut c = vec![Complex64::new(0.0, 0.0); n * n];
    for (row, &eta) in freq.iter().enumerate() {
        for (col, &xi) in freq.iter().enumerate() {
            if row == 0 && col == 0 {
                continue;
            }
            let zeta = Complex64::new(xi, eta);
            s[row * n + col] = zeta.conj() / zeta;
            c[row * n + col] = 1.0 / (Complex64::new(0.0, PI) * zeta);
        }
    }
    (s, c)
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Iteration budget `ceil(log tol / log k) + margin`.
pub fn iteration_budget(k: f64, tol: f64) -> usize {
    if k <= 0.0 {
        return ITERATION_MARGIN;
    }
    (tol.ln() / k.ln()).ceil().max(0.0) as usize + ITERATION_MARGIN
}

/// Neumann iteration `h ← μ(1 + S h)` from `h = μ` until the relative
/// residual `‖h - μSh - μ‖₂ / ‖μ‖₂` drops below `tol`.
pub fn solve_principal(grid: Arc<SolverGrid>, tol: f64) -> Result<SolverSolution> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let k = grid.norm_bound();
    if k >= 1.0 {
        return Err(Error::NotQuasiconformal(k));
    }
    let n = grid.n();
    let mu = grid.samples();
    let fft = Fft2::new(n);
    let (s_mul, c_mul) = multipliers(n, grid.cell());
    let mut scratch = vec![Complex64::new(0.0, 0.0); n * n];
    let mu_norm = l2(mu);

    let mut h = mu.to_vec();
    let mut history = Vec::new();
    if mu_norm > 0.0 {
        let budget = iteration_budget(k, tol);
        let mut work = vec![Complex64::new(0.0, 0.0); n * n];
        loop {
            work.copy_from_slice(&h);
            fft.forward(&mut work, &mut scratch);
            work.par_iter_mut().zip(&s_mul).for_each(|(w, s)| *w *= s);
            fft.inverse(&mut work, &mut scratch);
            // work ← μ S h + μ
            work.par_iter_mut().zip(mu).for_each(|(w, m)| *w = m * *w + m);
            let diff: f64 = work
                .iter()
                .zip(&h)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let res = diff / mu_norm;
            history.push(res);
            std::mem::swap(&mut h, &mut work);
            if !res.is_finite() || history.len() >= budget && res >= tol {
                return Err(Error::NoConvergence { history });
            }
            if res < tol {
                break;
            }
        }
    }

    let mean = h.iter().sum::<Complex64>() / (n * n) as f64;
    let mut periodic: Vec<Complex64> = h.iter().map(|v| v - mean).collect();
    fft.forward(&mut periodic, &mut scratch);
    periodic.par_iter_mut().zip(&c_mul).for_each(|(w, c)| *w *= c);
    fft.inverse(&mut periodic, &mut scratch);

    let mut sol = SolverSolution {
        grid,
        h,
        mean,
        periodic,
        history,
        f0: Complex64::new(0.0, 0.0),
        scale: Complex64::new(1.0, 0.0),
    };
    let f0 = sol.raw_map(Complex64::new(0.0, 0.0))?;
    let f1 = sol.raw_map(Complex64::new(1.0, 0.0))?;
    if (f1 - f0).norm() == 0.0 {
        return Err(Error::Singular("solver map sends 0 and 1 to the same point".into()));
    }
    sol.f0 = f0;
    sol.scale = f1 - f0;
    Ok(sol)
}

/// Keys cubic convolution weights for offsets `-1, 0, 1, 2` at fraction `s`.
fn keys_weights(s: f64) -> [f64; 4] {
    const A: f64 = -0.5;
    let near = |x: f64| ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0;
    let far = |x: f64| ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A;
    [far(1.0 + s), near(s), near(1.0 - s), far(2.0 - s)]
}

impl SolverSolution {
    pub fn grid(&self) -> &SolverGrid {
        &self.grid
    }

    /// The density `h = f_z̄` before normalization.
    pub fn density(&self) -> &[Complex64] {
        &self.h
    }

    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    pub fn residual_history(&self) -> &[f64] {
        &self.history
    }

    /// Relative residual of the last accepted iterate (zero when `μ ≡ 0`).
    pub fn residual(&self) -> f64 {
        self.history.last().copied().unwrap_or(0.0)
    }

    /// Largest ratio of consecutive residuals.
    pub fn convergence_ratio(&self) -> Option<f64> {
        self.history
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .reduce(f64::max)
    }

    /// Order of the off-lattice interpolation.
    pub fn interpolation_order(&self) -> usize {
        3
    }

    pub fn norm_bound(&self) -> f64 {
        self.grid.norm_bound()
    }

    pub fn cell(&self) -> f64 {
        self.grid.cell()
    }

    /// Half-width of the square on which [`SolverSolution::evaluate_map`] is defined.
    pub fn interior_half_width(&self) -> f64 {
        self.grid.half_width() - INTERIOR_MARGIN * self.cell()
    }

    fn periodic_at(&self, z: Complex64) -> Complex64 {
        let n = self.grid.n();
        let h = self.cell();
        let b = self.grid.half_width();
        let u = (z.re + b) / h;
        let v = (z.im + b) / h;
        let (iu, iv) = (u.floor(), v.floor());
        let (wu, wv) = (keys_weights(u - iu), keys_weights(v - iv));
        let wrap = |i: f64| (i as isize).rem_euclid(n as isize) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for (dy, wy) in wv.iter().enumerate() {
            let row = wrap(iv + dy as f64 - 1.0) * n;
            for (dx, wx) in wu.iter().enumerate() {
                acc += self.periodic[row + wrap(iu + dx as f64 - 1.0)] * (wx * wy);
            }
        }
        acc
    }

    fn raw_map(&self, z: Complex64) -> Result<Complex64> {
        let z = finite_c(z, "z")?;
        let lim = self.interior_half_width();
        if z.re.abs() > lim || z.im.abs() > lim {
            return Err(Error::Extrapolation(z));
        }
        Ok(z + self.mean * z.conj() + self.periodic_at(z))
    }

    /// `f(z)` normalized so that `f(0) = 0` and `f(1) = 1`.
    pub fn evaluate_map(&self, z: Complex64) -> Result<Complex64> {
        let w = self.raw_map(z)?;
        Ok((w - self.f0) / self.scale)
    }
}

/// [`solve_principal`] followed by [`SolverSolution::evaluate_map`].
pub fn evaluate_map(sol: &SolverSolution, z: Complex64) -> Result<Complex64> {
    sol.evaluate_map(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_weights_partition_unity() {
        for s in [0.0, 0.25, 0.5, 0.9] {
            let w = keys_weights(s);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
        assert_eq!(keys_weights(0.0), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn budget_formula() {
        assert_eq!(iteration_budget(0.5, 1e-3), 10 + ITERATION_MARGIN);
        assert_eq!(iteration_budget(0.0, 1e-3), ITERATION_MARGIN);
    }

    #[test]
    fn zero_coefficient_gives_identity() {
        let g = Arc::new(SolverGrid::constant(32, 2.0, Complex64::new(0.0, 0.0)).unwrap());
        let sol = solve_principal(g, 1e-10).unwrap();
        assert_eq!(sol.iterations(), 0);
        for z in [Complex64::new(0.3, -0.7), Complex64::new(1.1, 1.3)] {
            assert_eq!(sol.evaluate_map(z).unwrap(), z);
        }
    }

    #[test]
    fn extrapolation_is_rejected() {
        let g = Arc::new(SolverGrid::constant(32, 2.0, Complex64::new(0.1, 0.0)).unwrap());
        let sol = solve_principal(g, 1e-10).unwrap();
        assert!(matches!(
            sol.evaluate_map(Complex64::new(1.9, 0.0)),
            Err(Error::Extrapolation(_))
        ));
        assert!(sol.evaluate_map(Complex64::new(1.7, -1.7)).is_ok());
    }
}
