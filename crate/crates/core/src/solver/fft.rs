use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Square 2-D FFT; rows are transformed in parallel.
pub(crate) struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    fn rows(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        data.par_chunks_mut(self.n).for_each_init(
            || vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
            |scratch, row| fft.process_with_scratch(row, scratch),
        );
    }

    fn transpose(&self, src: &[Complex64], dst: &mut [Complex64]) {
        let n = self.n;
        dst.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = src[j * n + i];
            }
        });
    }

    fn apply(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.rows(fft, data);
        self.transpose(data, scratch);
        self.rows(fft, scratch);
        self.transpose(scratch, data);
    }

    pub fn forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.apply(&self.fwd, data, scratch);
    }

    /// Inverse transform including the `1/n²` factor.
    pub fn inverse(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.apply(&self.inv, data, scratch);
        let s = 1.0 / (self.n * self.n) as f64;
        data.par_iter_mut().for_each(|v| *v *= s);
    }
}

/// Sample frequencies in numpy `fftfreq` order for spacing `d`.
pub(crate) fn fftfreq(n: usize, d: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let k = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
            k / (n as f64 * d)
        })
        .collect()
}
