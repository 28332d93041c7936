//! Recovery losses of a denoised signal.

use convden::signal::{convolve_oracle, dft_vec};
use convden::{ComplexSignal, C64};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `||x - x_hat||_{n,2} = ((n+1)^{-1} sum_{t=0}^n |x_t - x_hat_t|^2)^{1/2}`.
    pub l2_loss: f64,
    /// `||F_n[x - x_hat]_0^n||_inf`.
    pub linf_fourier_loss: f64,
}

/// Losses of the estimate `x_hat` given on `[0, n]`.
pub fn metrics_from_estimate(x: &ComplexSignal, estimate: &[C64], n: usize) -> Result<Metrics> {
    if estimate.len() != n + 1 {
        return Err(BenchError::Input(format!(
            "estimate has {} samples, expected {}",
            estimate.len(),
            n + 1
        )));
    }
    let err: Vec<C64> = (0..=n).map(|t| x.at(t as i64) - estimate[t]).collect();
    let l2_loss = (err.iter().map(|v| v.norm_sqr()).sum::<f64>() / (n + 1) as f64).sqrt();
    let linf_fourier_loss = dft_vec(&err)?.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(Metrics {
        l2_loss,
        linf_fourier_loss,
    })
}

/// Losses of `phi * y` against the clean signal `x`.
pub fn metrics(x: &ComplexSignal, phi: &ComplexSignal, y: &ComplexSignal, n: usize) -> Result<Metrics> {
    let estimate = convolve_oracle(phi, y, n)?;
    metrics_from_estimate(x, &estimate, n)
}
