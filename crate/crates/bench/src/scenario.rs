//! Synthetic harmonic scenarios and observation noise.
//!
//! Every generator evaluates its formula on the whole window `[-n, n]` and
//! scales the result so that `||[x]_0^n||_2 = 1`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use convden::{ComplexSignal, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScenarioKind {
    /// `s` random frequencies.
    RanSin { s: usize },
    /// `s` pairs of frequencies `0.2 pi / n` apart.
    CohSin { s: usize },
    /// `s` frequencies with degree-`m` polynomial amplitudes.
    ModSin { s: usize, m: usize },
}

impl ScenarioKind {
    pub fn subspace_dim(&self) -> usize {
        match *self {
            ScenarioKind::RanSin { s } => s,
            ScenarioKind::CohSin { s } => 2 * s,
            ScenarioKind::ModSin { s, m } => 2 * s * (m + 1),
        }
    }

    pub fn generate(&self, n: usize, rng: &mut impl Rng) -> Result<ComplexSignal> {
        match *self {
            ScenarioKind::RanSin { s } => generate_ransin(s, n, rng),
            ScenarioKind::CohSin { s } => generate_cohsin(s, n, rng),
            ScenarioKind::ModSin { s, m } => generate_modsin(s, m, n, rng),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ScenarioKind::RanSin { s } => write!(f, "ransin-{s}"),
            ScenarioKind::CohSin { s } => write!(f, "cohsin-{s}"),
            ScenarioKind::ModSin { s, m } => write!(f, "modsin-{s}-{m}"),
        }
    }
}

/// `sigma = 1 / (snr sqrt(n))`.
pub fn sigma_for_snr(snr: f64, n: usize) -> Result<f64> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(BenchError::Input(format!("snr must be positive, got {snr}")));
    }
    if n == 0 {
        return Err(BenchError::Input("snr is undefined for n = 0".into()));
    }
    Ok(1.0 / (snr * (n as f64).sqrt()))
}

/// Generator for trial `trial` of an experiment seeded with `seed`: the
/// ChaCha20 stream number is the trial index, so trials never share draws.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn check_s(s: usize) -> Result<()> {
    if s < 1 {
        return Err(BenchError::Input("need at least one frequency".into()));
    }
    Ok(())
}

fn normalized(n: usize, mut f: impl FnMut(f64) -> C64) -> Result<ComplexSignal> {
    let n_i = n as i64;
    let values: Vec<C64> = (-n_i..=n_i).map(|t| f(t as f64)).collect();
    let norm = values[n..].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(BenchError::Input("generated signal has zero or non-finite norm".into()));
    }
    Ok(ComplexSignal::two_sided(values.into_iter().map(|v| v / norm).collect())?)
}

/// `x_t = sum_k a_k e^{i w_k t}`, `w_k ~ U[0, 2 pi)`, `a_k ~ U[0, 1]`.
pub fn generate_ransin(s: usize, n: usize, rng: &mut impl Rng) -> Result<ComplexSignal> {
    check_s(s)?;
    let tones: Vec<(f64, f64)> = (0..s).map(|_| (rng.random_range(0.0..=1.0), rng.random_range(0.0..TAU))).collect();
    normalized(n, |t| tones.iter().map(|&(a, w)| C64::from_polar(a, w * t)).sum())
}

/// Pairs `(w_k, w_k + 0.2 pi / n)` sharing an amplitude `a_k ~ U[0, 1]`.
pub fn generate_cohsin(s: usize, n: usize, rng: &mut impl Rng) -> Result<ComplexSignal> {
    check_s(s)?;
    let gap = 0.2 * PI / n.max(1) as f64;
    let pairs: Vec<(f64, f64)> = (0..s).map(|_| (rng.random_range(0.0..=1.0), rng.random_range(0.0..TAU))).collect();
    normalized(n, |t| {
        pairs
            .iter()
            .map(|&(a, w)| C64::from_polar(a, w * t) + C64::from_polar(a, (w + gap) * t))
            .sum()
    })
}

/// Standard complex Gaussian, `E|z|^2 = 1`.
fn complex_normal(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `x_t = sum_k p_k(t) e^{i w_k t}` with `p_k(t) = sum_j c_kj (t/n)^j`.
///
/// The argument is scaled by `n` so that no single power dominates; this
/// spans the same polynomials as a raw `t^j` basis.
pub fn generate_modsin(s: usize, m: usize, n: usize, rng: &mut impl Rng) -> Result<ComplexSignal> {
    check_s(s)?;
    let tones: Vec<(f64, Vec<C64>)> = (0..s)
        .map(|_| {
            let w = rng.random_range(0.0..TAU);
            let coeffs = (0..=m).map(|_| complex_normal(rng)).collect();
            (w, coeffs)
        })
        .collect();
    let scale = n.max(1) as f64;
    normalized(n, |t| {
        let x = t / scale;
        tones
            .iter()
            .map(|(w, c)| {
                let p = c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &ck| acc * x + ck);
                p * C64::from_polar(1.0, w * t)
            })
            .sum()
    })
}

/// `y = x + sigma zeta` with `Re zeta`, `Im zeta` independent standard normals.
pub fn add_noise(x: &ComplexSignal, sigma: f64, rng: &mut impl Rng) -> Result<ComplexSignal> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(BenchError::Input(format!("sigma must be nonnegative, got {sigma}")));
    }
    let values = x
        .values()
        .iter()
        .map(|&v| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            v + C64::new(re, im) * sigma
        })
        .collect();
    Ok(ComplexSignal::new(x.start(), values)?)
}
