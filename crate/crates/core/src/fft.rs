use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward transform normalized so that entry `k` is the Fourier coefficient
/// `(1/M) Σ_j x_j e^{-2πi jk/M}`.
pub(crate) struct Analyzer {
    fft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Analyzer {
    pub(crate) fn new(len: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(len);
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        Self { fft, scratch }
    }

    pub(crate) fn len(&self) -> usize {
        self.fft.len()
    }

    pub(crate) fn coefficients_in_place(&mut self, buf: &mut [Complex64]) {
        self.fft.process_with_scratch(buf, &mut self.scratch);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
    }

    pub(crate) fn coefficients(&mut self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut buf = samples.to_vec();
        self.coefficients_in_place(&mut buf);
        buf
    }
}

/// Unnormalized inverse transform: `x_j = Σ_k c_k e^{2πi jk/M}`.
pub(crate) fn synthesize_raw(mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    let fft = FftPlanner::new().plan_fft_inverse(coeffs.len());
    fft.process(&mut coeffs);
    coeffs
}

/// Index of signed mode `m` in an FFT buffer of length `len`.
pub(crate) fn slot(m: i64, len: usize) -> usize {
    m.rem_euclid(len as i64) as usize
}
