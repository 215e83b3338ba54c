//! Thin wrapper over `rustfft` for length-`N` transforms on the circle.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Unnormalized forward (`Σ_j v_j e^{-2πi jk/N}`) and inverse
/// (`Σ_k c_k e^{+2πi jk/N}`) transforms of a fixed length.
#[derive(Clone)]
pub(crate) struct Dft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Dft {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Dft { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    pub(crate) fn forward(&self, buf: &mut [C64]) {
        self.forward.process(buf);
    }

    pub(crate) fn inverse(&self, buf: &mut [C64]) {
        self.inverse.process(buf);
    }
}

/// Bin of frequency `k` in a length-`n` transform.
pub(crate) fn bin(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}
