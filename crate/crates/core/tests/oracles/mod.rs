//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls into the FFT path or the prox code of the library:
//! transforms are naive sums and convex subproblems go through a generic
//! ellipsoid method.
#![allow(dead_code)]

use std::f64::consts::PI;

use convden::{ComplexSignal, SpectralVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_c(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_complex(rng: &mut impl Rng, len: usize) -> Vec<C64> {
    (0..len).map(|_| gaussian_c(rng)).collect()
}

pub fn random_spectral(rng: &mut impl Rng, complex_len: usize) -> SpectralVector {
    SpectralVector::from_complex(&random_complex(rng, complex_len))
}

pub fn random_observation(rng: &mut impl Rng, n: usize) -> ComplexSignal {
    ComplexSignal::two_sided(random_complex(rng, 2 * n + 1)).unwrap()
}

/// `L^{-1/2} sum_t x_t exp(sign 2 pi i k t / L)`.
pub fn naive_transform(x: &[C64], sign: f64) -> Vec<C64> {
    let l = x.len();
    let s = 1.0 / (l as f64).sqrt();
    (0..l)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, &v)| {
                    let ang = sign * 2.0 * PI * ((k * t) % l) as f64 / l as f64;
                    v * C64::new(ang.cos(), ang.sin())
                })
                .sum::<C64>()
                * s
        })
        .collect()
}

pub fn naive_dft(x: &[C64]) -> Vec<C64> {
    naive_transform(x, 1.0)
}

pub fn naive_idft(x: &[C64]) -> Vec<C64> {
    naive_transform(x, -1.0)
}

/// `[phi * y]_t` for `t` in `[0, n]`, with `phi` given on `[0, n]` and `y` on `[-n, n]`.
pub fn naive_convolve(phi: &[C64], y: &[C64], n: usize) -> Vec<C64> {
    (0..=n)
        .map(|t| (0..=n).map(|s| phi[s] * y[t + n - s]).sum())
        .collect()
}

/// `A u` through time domain: filter, convolve, transform.
pub fn brute_apply(y: &[C64], n: usize, u: &SpectralVector) -> SpectralVector {
    let phi = naive_idft(&u.to_complex());
    SpectralVector::from_complex(&naive_dft(&naive_convolve(&phi, y, n)))
}

/// Dense real matrix of `A` (column-major by basis vector).
pub fn dense_matrix(y: &[C64], n: usize) -> Vec<Vec<f64>> {
    let d = 2 * (n + 1);
    (0..d)
        .map(|j| {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            brute_apply(y, n, &SpectralVector::from_real(e).unwrap())
                .into_inner()
        })
        .collect()
}

/// Spectral norm of a dense real matrix given by columns, via power iteration on `M^T M`.
pub fn spectral_norm(cols: &[Vec<f64>]) -> f64 {
    let d = cols.len();
    let rows = cols[0].len();
    let mut x = vec![1.0 / (d as f64).sqrt(); d];
    let mut est = 0.0;
    for _ in 0..2000 {
        let mut mx = vec![0.0; rows];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                mx[i] += c[i] * x[j];
            }
        }
        let mut mtmx: Vec<f64> = cols.iter().map(|c| c.iter().zip(&mx).map(|(a, b)| a * b).sum()).collect();
        let norm = mtmx.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        mtmx.iter_mut().for_each(|v| *v /= norm);
        x = mtmx;
        est = norm.sqrt();
    }
    est
}

pub fn real_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Parameters of the blockwise d.-g.f. on complex pairs
/// `omega(x) = C/2 (sum_j |x_j|^q)^{2/q}`, recomputed from first principles.
#[derive(Clone, Copy, Debug)]
pub struct PairDgf {
    pub q: f64,
    pub scale: f64,
    /// Single block over all coordinates (plain Euclidean).
    pub euclidean: bool,
}

impl PairDgf {
    pub fn complex_l1(complex_len: usize) -> Self {
        let m = (complex_len - 1) as f64;
        let (q, c) = if m <= 1.0 {
            (2.0, 1.0 / (m + 1.0))
        } else {
            let l = (m + 1.0).ln();
            (1.0 + 1.0 / l, 1.0 / (std::f64::consts::E * l))
        };
        let scale = (m + 1.0).powf((q - 1.0) * (2.0 - q) / q) / c;
        Self {
            q,
            scale,
            euclidean: false,
        }
    }

    pub fn euclidean() -> Self {
        Self {
            q: 2.0,
            scale: 1.0,
            euclidean: true,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        if self.euclidean {
            return 0.5 * real_dot(x, x);
        }
        let s: f64 = x.chunks(2).map(|p| p[0].hypot(p[1]).powf(self.q)).sum();
        0.5 * self.scale * s.powf(2.0 / self.q)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        if self.euclidean {
            return x.to_vec();
        }
        let s: f64 = x.chunks(2).map(|p| p[0].hypot(p[1]).powf(self.q)).sum();
        if s == 0.0 {
            return vec![0.0; x.len()];
        }
        let outer = self.scale * s.powf(2.0 / self.q - 1.0);
        let mut g = vec![0.0; x.len()];
        for (gp, p) in g.chunks_mut(2).zip(x.chunks(2)) {
            let r = p[0].hypot(p[1]);
            if r > 0.0 {
                let f = outer * r.powf(self.q - 2.0);
                gp[0] = f * p[0];
                gp[1] = f * p[1];
            }
        }
        g
    }
}

pub fn pair_l1(x: &[f64]) -> f64 {
    x.chunks(2).map(|p| p[0].hypot(p[1])).sum()
}

/// A subgradient of `sum_j |x_j|` (zero on zero pairs).
pub fn pair_l1_subgradient(x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    for (gp, p) in g.chunks_mut(2).zip(x.chunks(2)) {
        let r = p[0].hypot(p[1]);
        if r > 0.0 {
            gp[0] = p[0] / r;
            gp[1] = p[1] / r;
        }
    }
    g
}

/// Convex program for the ellipsoid method: an objective with a subgradient
/// oracle and an optional constraint `g(x) <= 0` with its subgradient.
pub trait ConvexProgram {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;
    fn constraint(&self, _x: &[f64]) -> Option<(f64, Vec<f64>)> {
        None
    }
}

/// Central-cut ellipsoid method started from the ball of radius `r0` around
/// the origin. Returns the best feasible point seen.
pub fn ellipsoid_minimize(p: &dyn ConvexProgram, r0: f64, max_iter: usize) -> Vec<f64> {
    let d = p.dim();
    let df = d as f64;
    let mut c = vec![0.0; d];
    let mut m = vec![vec![0.0; d]; d];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = r0 * r0;
    }
    let mut best = vec![0.0; d];
    let mut best_val = f64::INFINITY;
    for _ in 0..max_iter {
        let g = match p.constraint(&c) {
            Some((viol, g)) if viol > 0.0 => g,
            _ => {
                let v = p.value(&c);
                if v < best_val {
                    best_val = v;
                    best.clone_from(&c);
                }
                p.subgradient(&c)
            }
        };
        let mg: Vec<f64> = m.iter().map(|row| real_dot(row, &g)).collect();
        let gmg = real_dot(&g, &mg);
        if !(gmg > 1e-30) {
            break;
        }
        let s = gmg.sqrt();
        let b: Vec<f64> = mg.iter().map(|v| v / s).collect();
        for (ci, bi) in c.iter_mut().zip(&b) {
            *ci -= bi / (df + 1.0);
        }
        let f = df * df / (df * df - 1.0);
        let k = 2.0 / (df + 1.0);
        for i in 0..d {
            for j in 0..d {
                m[i][j] = f * (m[i][j] - k * b[i] * b[j]);
            }
        }
        // keep the shape matrix symmetric against roundoff drift
        for i in 0..d {
            for j in 0..i {
                let a = 0.5 * (m[i][j] + m[j][i]);
                m[i][j] = a;
                m[j][i] = a;
            }
        }
    }
    best
}

/// `min <z, x> + omega(x) + w1 ||x||_1 + w2 ||x||_1^2` subject to optional
/// `||x||_1 <= r1` or `||x||_2 <= r2`.
pub struct ProxProgram {
    pub z: Vec<f64>,
    pub dgf: PairDgf,
    pub w1: f64,
    pub w2: f64,
    pub l1_radius: Option<f64>,
    pub l2_radius: Option<f64>,
}

impl ProxProgram {
    pub fn new(z: Vec<f64>, dgf: PairDgf) -> Self {
        Self {
            z,
            dgf,
            w1: 0.0,
            w2: 0.0,
            l1_radius: None,
            l2_radius: None,
        }
    }

    /// A radius around the origin containing the minimizer: `omega` is
    /// 1-strongly convex in `l2` and every term vanishes at zero, so
    /// `||x*||_2 <= 2 ||z||_2`.
    pub fn start_radius(&self) -> f64 {
        2.0 * real_dot(&self.z, &self.z).sqrt() + 1e-3
    }

    pub fn solve(&self) -> Vec<f64> {
        ellipsoid_minimize(self, self.start_radius(), 20_000)
    }
}

impl ConvexProgram for ProxProgram {
    fn dim(&self) -> usize {
        self.z.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let l1 = pair_l1(x);
        real_dot(&self.z, x) + self.dgf.value(x) + self.w1 * l1 + self.w2 * l1 * l1
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let l1 = pair_l1(x);
        let h = pair_l1_subgradient(x);
        let g = self.dgf.gradient(x);
        (0..x.len())
            .map(|i| self.z[i] + g[i] + (self.w1 + 2.0 * self.w2 * l1) * h[i])
            .collect()
    }

    fn constraint(&self, x: &[f64]) -> Option<(f64, Vec<f64>)> {
        if let Some(r) = self.l1_radius {
            return Some((pair_l1(x) - r, pair_l1_subgradient(x)));
        }
        if let Some(r) = self.l2_radius {
            let nrm = real_dot(x, x).sqrt();
            let g = if nrm > 0.0 { x.iter().map(|v| v / nrm).collect() } else { vec![0.0; x.len()] };
            return Some((nrm - r, g));
        }
        None
    }
}

pub fn to_real(z: &[C64]) -> Vec<f64> {
    SpectralVector::from_complex(z).into_inner()
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn l2(a: &[C64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}
