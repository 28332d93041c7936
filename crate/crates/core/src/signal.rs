//! Complex signals, the unitary DFT and the real vectorization of spectra.
//!
//! Conventions used throughout the crate:
//!
//! - The DFT of a length-`L` vector is
//!   `[F x]_k = L^{-1/2} sum_t x_t exp(+2 pi i k t / L)`, which is unitary.
//! - A [`SpectralVector`] stores complex coordinate `j` at entries `(2j, 2j+1)`
//!   as `(re, im)`.
//! - Signals supported on `[-n, n]` are handed to length-`(2n+1)` transforms in
//!   wrapped order: time index `tau` goes to slot `tau mod (2n+1)`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type C64 = Complex<f64>;

/// A finitely supported complex sequence on the integers.
///
/// Values outside `[start, start + len - 1]` are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSignal {
    start: i64,
    values: Vec<C64>,
}

impl ComplexSignal {
    pub fn new(start: i64, values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("signal must have at least one sample");
        }
        Ok(Self { start, values })
    }

    /// Signal supported on `[0, values.len() - 1]`.
    pub fn one_sided(values: Vec<C64>) -> Result<Self> {
        Self::new(0, values)
    }

    /// Signal supported on `[-n, n]`; `values` must have odd length `2n + 1`.
    pub fn two_sided(values: Vec<C64>) -> Result<Self> {
        if values.len() % 2 == 0 {
            return invalid(format!(
                "two-sided signal needs odd length 2n+1, got {}",
                values.len()
            ));
        }
        let n = (values.len() / 2) as i64;
        Self::new(-n, values)
    }

    /// Evaluates `f(tau)` on `[start, start + len - 1]`.
    pub fn from_fn(start: i64, len: usize, f: impl FnMut(i64) -> C64) -> Result<Self> {
        let values = (start..start + len as i64).map(f).collect();
        Self::new(start, values)
    }

    pub fn zeros(start: i64, len: usize) -> Result<Self> {
        Self::new(start, vec![C64::new(0.0, 0.0); len])
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// Last index of the support (inclusive).
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn at(&self, tau: i64) -> C64 {
        if tau < self.start || tau > self.end() {
            C64::new(0.0, 0.0)
        } else {
            self.values[(tau - self.start) as usize]
        }
    }

    /// The restriction `[x]_from^to` as a vector (zero outside the support).
    pub fn window(&self, from: i64, to: i64) -> Vec<C64> {
        (from..=to).map(|tau| self.at(tau)).collect()
    }

    /// `Some(n)` when the support is exactly `[-n, n]`.
    pub fn symmetric_half_length(&self) -> Option<usize> {
        let n = -self.start;
        (n >= 0 && self.end() == n).then_some(n as usize)
    }

    /// `Some(n)` when the support is exactly `[0, n]`.
    pub fn one_sided_length(&self) -> Option<usize> {
        (self.start == 0).then(|| self.values.len() - 1)
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self {
            start: self.start,
            values: self.values.iter().map(|v| v * alpha).collect(),
        }
    }
}

/// Real vector of interleaved `(re, im)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectralVector(Vec<f64>);

impl SpectralVector {
    pub fn from_real(entries: Vec<f64>) -> Result<Self> {
        if entries.len() % 2 != 0 {
            return invalid(format!(
                "spectral vector needs even dimension, got {}",
                entries.len()
            ));
        }
        Ok(Self(entries))
    }

    pub fn zeros(complex_len: usize) -> Self {
        Self(vec![0.0; 2 * complex_len])
    }

    pub fn from_complex(z: &[C64]) -> Self {
        let mut out = Vec::with_capacity(2 * z.len());
        for c in z {
            out.push(c.re);
            out.push(c.im);
        }
        Self(out)
    }

    pub fn to_complex(&self) -> Vec<C64> {
        self.0
            .chunks_exact(2)
            .map(|p| C64::new(p[0], p[1]))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn complex_len(&self) -> usize {
        self.0.len() / 2
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Magnitude of complex coordinate `j`.
    pub fn pair_abs(&self, j: usize) -> f64 {
        self.0[2 * j].hypot(self.0[2 * j + 1])
    }

    pub fn pair_magnitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.chunks_exact(2).map(|p| p[0].hypot(p[1]))
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// `||Vec^H u||_1`: sum of pair magnitudes.
    pub fn complex_l1(&self) -> f64 {
        self.pair_magnitudes().sum()
    }

    /// `||Vec^H u||_inf`: largest pair magnitude.
    pub fn complex_linf(&self) -> f64 {
        self.pair_magnitudes().fold(0.0, f64::max)
    }

    /// `||Vec^H u||_p` for `p` in `[1, inf]`.
    pub fn complex_norm(&self, p: f64) -> f64 {
        if p == 1.0 {
            self.complex_l1()
        } else if p == 2.0 {
            self.norm2()
        } else if p.is_infinite() {
            self.complex_linf()
        } else {
            self.pair_magnitudes()
                .map(|m| m.powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        }
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: f64, x: &Self) {
        debug_assert_eq!(self.dim(), x.dim());
        for (a, b) in self.0.iter_mut().zip(&x.0) {
            *a += alpha * b;
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self(self.0.iter().map(|a| alpha * a).collect())
    }

    /// `alpha * self + beta * other`
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(1.0, other, -1.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }
}

/// Cached unitary transforms of one length, in the crate's sign convention.
#[derive(Clone)]
pub struct DftPlan {
    len: usize,
    scale: f64,
    // rustfft's inverse direction carries the +i exponent used here for F.
    plus: Arc<dyn Fft<f64>>,
    minus: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftPlan").field("len", &self.len).finish()
    }
}

impl DftPlan {
    pub fn new(len: usize) -> Result<Self> {
        let mut planner = FftPlanner::new();
        Self::with_planner(&mut planner, len)
    }

    pub fn with_planner(planner: &mut FftPlanner<f64>, len: usize) -> Result<Self> {
        if len == 0 {
            return invalid("DFT length must be positive");
        }
        Ok(Self {
            len,
            scale: 1.0 / (len as f64).sqrt(),
            plus: planner.plan_fft_inverse(len),
            minus: planner.plan_fft_forward(len),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place `F`.
    pub fn forward(&self, buf: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.plus.process(buf);
        buf.iter_mut().for_each(|v| *v *= self.scale);
    }

    /// In-place `F^H = F^{-1}`.
    pub fn inverse(&self, buf: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.minus.process(buf);
        buf.iter_mut().for_each(|v| *v *= self.scale);
    }
}

/// Unitary DFT of the samples of `s` (in stored order).
pub fn dft(s: &ComplexSignal) -> Result<Vec<C64>> {
    dft_vec(s.values())
}

pub fn dft_vec(x: &[C64]) -> Result<Vec<C64>> {
    let plan = DftPlan::new(x.len())?;
    let mut buf = x.to_vec();
    plan.forward(&mut buf);
    Ok(buf)
}

pub fn idft(spectrum: &[C64]) -> Result<Vec<C64>> {
    let plan = DftPlan::new(spectrum.len())?;
    let mut buf = spectrum.to_vec();
    plan.inverse(&mut buf);
    Ok(buf)
}

/// `Vec_n z`.
pub fn vec(z: &[C64]) -> SpectralVector {
    SpectralVector::from_complex(z)
}

/// `Vec_n^H u`.
pub fn vec_adjoint(u: &SpectralVector) -> Vec<C64> {
    u.to_complex()
}

/// `P_n`: keep the first `n + 1` coordinates of a longer vector.
pub fn restrict(v: &[C64], n: usize) -> Result<Vec<C64>> {
    if v.len() < n + 1 {
        return invalid(format!("cannot keep {} coordinates of a length-{} vector", n + 1, v.len()));
    }
    Ok(v[..=n].to_vec())
}

/// `P_n^H`: append zeros up to `target`.
pub fn zero_pad(v: &[C64], target: usize) -> Result<Vec<C64>> {
    if v.is_empty() || target < v.len() {
        return invalid(format!("cannot pad length {} to {}", v.len(), target));
    }
    let mut out = v.to_vec();
    out.resize(target, C64::new(0.0, 0.0));
    Ok(out)
}

/// `||s||_{n,p} = ((n+1)^{-1} sum_{tau=0}^n |s_tau|^p)^{1/p}`; `p = inf` gives the max.
pub fn scaled_lp_seminorm(s: &ComplexSignal, n: usize, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return invalid(format!("seminorm exponent must be >= 1, got {p}"));
    }
    let mags = (0..=n as i64).map(|t| s.at(t).norm());
    if p.is_infinite() {
        return Ok(mags.fold(0.0, f64::max));
    }
    let mean = mags.map(|m| m.powf(p)).sum::<f64>() / (n + 1) as f64;
    Ok(mean.powf(1.0 / p))
}

/// `[phi * y]_t` for `0 <= t <= n` by direct summation.
///
/// `phi` must live on `[0, n]` and `y` on `[-n, n]`. Quadratic time; this is
/// the reference the FFT path is checked against.
pub fn convolve_oracle(phi: &ComplexSignal, y: &ComplexSignal, n: usize) -> Result<Vec<C64>> {
    let n_i = n as i64;
    if phi.start() < 0 || phi.end() > n_i {
        return invalid(format!(
            "filter support [{}, {}] not inside [0, {n}]",
            phi.start(),
            phi.end()
        ));
    }
    if y.start() < -n_i || y.end() > n_i {
        return invalid(format!(
            "observation support [{}, {}] not inside [-{n}, {n}]",
            y.start(),
            y.end()
        ));
    }
    Ok((0..=n_i)
        .map(|t| (0..=n_i).map(|tau| phi.at(tau) * y.at(t - tau)).sum())
        .collect())
}

/// Re-orders `[y]_{-n}^n` so time index `tau` lands in slot `tau mod (2n+1)`.
pub(crate) fn wrap_two_sided(y: &ComplexSignal, n: usize) -> Vec<C64> {
    let len = 2 * n + 1;
    let mut out = vec![C64::new(0.0, 0.0); len];
    for tau in -(n as i64)..=(n as i64) {
        out[tau.rem_euclid(len as i64) as usize] = y.at(tau);
    }
    out
}
