//! Blockwise proximal setups and prox-mappings.
//!
//! A setup splits `R^N` into `m + 1` blocks of size `k` and pairs the group
//! norm `sum_j ||u^j||_2` with the distance-generating function
//!
//! ```text
//! omega(u) = (C / 2) * (sum_j ||u^j||_2^q)^(2/q),
//! C = (m+1)^((q-1)(2-q)/q) / c,
//! (q, c) = (2, 1/(m+1))                         if m <= 1,
//!          (1 + 1/log(m+1), 1/(e log(m+1)))    otherwise.
//! ```
//!
//! Two instances matter: the complex `l1`-setup (one block per complex
//! coordinate) and the `l2`-setup (a single block, `omega = |u|^2 / 2`).
//!
//! All prox-mappings reduce to problems over complex coordinates
//! `min_zeta <zeta, z> + C/2 ||zeta||_q^2 + penalty(zeta)`, where the optimal
//! phases are `-z_j / |z_j|` and only magnitudes remain to be found.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::signal::{SpectralVector, C64};

/// Bisection tolerance on the scalar variable of the root searches.
pub const ROOT_TOLERANCE: f64 = 1e-12;
/// Iteration cap of the root searches.
pub const ROOT_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetupKind {
    /// One block per complex coordinate (`m = n`, `k = 2`).
    ComplexL1,
    /// A single block (`m = 0`, `k = N`).
    L2,
    /// Any other `(m + 1) x k` split.
    Blockwise,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProximalSetup {
    kind: SetupKind,
    block_count: usize,
    block_size: usize,
    q_tilde: f64,
    c_tilde: f64,
    // C(m, q, c); cached because every prox needs it.
    scale: f64,
}

impl ProximalSetup {
    pub fn blockwise(block_count: usize, block_size: usize) -> Result<Self> {
        if block_count == 0 || block_size == 0 {
            return invalid("block count and block size must be positive");
        }
        if (block_count * block_size) % 2 != 0 {
            return invalid("setup dimension must be even");
        }
        let m = (block_count - 1) as f64;
        let (q_tilde, c_tilde) = if block_count <= 2 {
            (2.0, 1.0 / (m + 1.0))
        } else {
            let l = (m + 1.0).ln();
            (1.0 + 1.0 / l, 1.0 / (std::f64::consts::E * l))
        };
        let exponent = (q_tilde - 1.0) * (2.0 - q_tilde) / q_tilde;
        let scale = (m + 1.0).powf(exponent) / c_tilde;
        Ok(Self {
            kind: SetupKind::Blockwise,
            block_count,
            block_size,
            q_tilde,
            c_tilde,
            scale,
        })
    }

    /// Complex `l1`-setup on `C^{complex_len}`.
    pub fn complex_l1(complex_len: usize) -> Result<Self> {
        let mut s = Self::blockwise(complex_len, 2)?;
        s.kind = SetupKind::ComplexL1;
        Ok(s)
    }

    /// `l2`-setup `(||.||_2, ||.||_2^2 / 2)` on `C^{complex_len}`.
    pub fn l2(complex_len: usize) -> Result<Self> {
        let mut s = Self::blockwise(1, 2 * complex_len)?;
        s.kind = SetupKind::L2;
        Ok(s)
    }

    pub fn kind(&self) -> SetupKind {
        self.kind
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn dim(&self) -> usize {
        self.block_count * self.block_size
    }

    pub fn q_tilde(&self) -> f64 {
        self.q_tilde
    }

    pub fn c_tilde(&self) -> f64 {
        self.c_tilde
    }

    /// `C(m, q, c)`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn is_euclidean(&self) -> bool {
        self.q_tilde == 2.0
    }

    /// Whether the complex-coordinate prox formulas apply: blocks are complex
    /// pairs, or `omega` is a multiple of the squared Euclidean norm.
    fn supports_complex_prox(&self) -> bool {
        self.block_size == 2 || self.is_euclidean()
    }

    fn check_dim(&self, u: &SpectralVector) -> Result<()> {
        if u.dim() != self.dim() {
            return invalid(format!(
                "vector has dimension {}, setup expects {}",
                u.dim(),
                self.dim()
            ));
        }
        Ok(())
    }

    fn block_norms<'a>(&'a self, u: &'a SpectralVector) -> impl Iterator<Item = f64> + Clone + 'a {
        u.as_slice()
            .chunks_exact(self.block_size)
            .map(|b| b.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    /// The group norm `sum_j ||u^j||_2`.
    pub fn norm(&self, u: &SpectralVector) -> f64 {
        self.block_norms(u).sum()
    }

    /// Dual of the group norm: `max_j ||g^j||_2`.
    pub fn dual_norm(&self, g: &SpectralVector) -> f64 {
        self.block_norms(g).fold(0.0, f64::max)
    }

    pub fn dgf(&self, u: &SpectralVector) -> Result<f64> {
        self.check_dim(u)?;
        let s = lq_norm(self.block_norms(u), self.q_tilde);
        Ok(0.5 * self.scale * s * s)
    }

    /// `omega'(u)`; blocks with zero norm get a zero subgradient.
    pub fn dgf_grad(&self, u: &SpectralVector) -> Result<SpectralVector> {
        self.check_dim(u)?;
        let norms: Vec<f64> = self.block_norms(u).collect();
        let s = lq_norm(norms.iter().copied(), self.q_tilde);
        let mut out = SpectralVector::zeros(self.dim() / 2);
        if s == 0.0 {
            return Ok(out);
        }
        let q = self.q_tilde;
        for ((dst, src), &a) in out
            .as_mut_slice()
            .chunks_exact_mut(self.block_size)
            .zip(u.as_slice().chunks_exact(self.block_size))
            .zip(&norms)
        {
            if a == 0.0 {
                continue;
            }
            // C s^{2-q} a^{q-2} u^j, written to stay finite for tiny a.
            let coef = self.scale * (s / a).powf(2.0 - q);
            for (d, x) in dst.iter_mut().zip(src) {
                *d = coef * x;
            }
        }
        Ok(out)
    }

    /// Bregman divergence `D_u(xi) = omega(xi) - omega(u) - <omega'(u), xi - u>`.
    pub fn bregman(&self, center: &BregmanPoint, xi: &SpectralVector) -> Result<f64> {
        let w = self.dgf(xi)?;
        let lin = center.grad.dot(&xi.sub(&center.point));
        Ok(w - center.value - lin)
    }

    /// `sqrt(2 max { omega(u) : ||u|| <= R })`.
    ///
    /// The maximum sits at a single-block point, where `(sum a_j^q)^{2/q} = R^2`,
    /// so the radius is `R sqrt(C)`.
    pub fn omega_radius_bound(&self, radius: f64) -> Result<f64> {
        if !(radius >= 0.0) {
            return invalid(format!("radius must be nonnegative, got {radius}"));
        }
        Ok(radius * self.scale.sqrt())
    }

    /// The constant `K` with `omega_radius_bound(R) = K (sqrt(log(m+1)) + 1) R`.
    pub fn radius_constant(&self) -> f64 {
        let m = (self.block_count - 1) as f64;
        self.scale.sqrt() / ((m + 1.0).ln().sqrt() + 1.0)
    }
}

/// `(sum a_i^q)^{1/q}` evaluated with a max-rescaling.
fn lq_norm(values: impl Iterator<Item = f64> + Clone, q: f64) -> f64 {
    let peak = values.clone().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    if q == 2.0 {
        return values.map(|a| a * a).sum::<f64>().sqrt();
    }
    peak * values.map(|a| (a / peak).powf(q)).sum::<f64>().powf(1.0 / q)
}

/// A point together with `omega` and `omega'` evaluated there.
#[derive(Clone, Debug, PartialEq)]
pub struct BregmanPoint {
    point: SpectralVector,
    value: f64,
    grad: SpectralVector,
}

impl BregmanPoint {
    pub fn new(setup: &ProximalSetup, point: SpectralVector) -> Result<Self> {
        let value = setup.dgf(&point)?;
        let grad = setup.dgf_grad(&point)?;
        Ok(Self { point, value, grad })
    }

    /// The omega-center `u_omega = 0`.
    pub fn center(setup: &ProximalSetup) -> Self {
        let zero = SpectralVector::zeros(setup.dim() / 2);
        Self {
            point: zero.clone(),
            value: 0.0,
            grad: zero,
        }
    }

    pub fn point(&self) -> &SpectralVector {
        &self.point
    }

    pub fn dgf_value(&self) -> f64 {
        self.value
    }

    pub fn dgf_grad(&self) -> &SpectralVector {
        &self.grad
    }

    pub fn into_point(self) -> SpectralVector {
        self.point
    }
}

/// The composite part of a prox-mapping: constraint set and/or penalty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProxTerm {
    None,
    /// `||xi||_{C,1} <= radius`.
    L1Ball { radius: f64 },
    /// `weight * ||xi||_{C,1}^power`, `power` in `{1, 2}`.
    L1Penalty { weight: f64, power: u8 },
    /// `weight * ||xi||_{C,1}` together with `||xi||_{C,1} <= radius`.
    L1BallPenalty { radius: f64, weight: f64 },
    /// `||xi||_2 <= radius`.
    L2Ball { radius: f64 },
}

impl ProxTerm {
    /// The same term with its penalty weight multiplied by `factor`.
    pub fn scale_penalty(self, factor: f64) -> Self {
        match self {
            ProxTerm::L1Penalty { weight, power } => ProxTerm::L1Penalty {
                weight: weight * factor,
                power,
            },
            ProxTerm::L1BallPenalty { radius, weight } => ProxTerm::L1BallPenalty {
                radius,
                weight: weight * factor,
            },
            other => other,
        }
    }
}

/// `Soft_M(|x|) = (|x| - M)_+`; ties map to zero.
fn soft(magnitude: f64, threshold: f64) -> f64 {
    if magnitude > threshold {
        magnitude - threshold
    } else {
        0.0
    }
}

/// Places magnitude `a` along `-z / |z|`.
fn against(z: C64, a: f64) -> C64 {
    let r = z.norm();
    if r == 0.0 || a == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        -z * (a / r)
    }
}

/// Optimal magnitudes for `min <zeta, z> + omega(zeta) + t ||zeta||_1` given
/// the thresholded magnitudes `theta_j = (|z_j| - t)_+`.
fn q1_magnitudes(setup: &ProximalSetup, theta: &[f64]) -> Vec<f64> {
    let q = setup.q_tilde;
    let c = setup.scale;
    if setup.is_euclidean() {
        return theta.iter().map(|t| t / c).collect();
    }
    let p = q / (q - 1.0);
    let norm_p = lq_norm(theta.iter().copied(), p);
    if norm_p == 0.0 {
        return vec![0.0; theta.len()];
    }
    let denom = norm_p.powf(2.0 - q);
    theta
        .iter()
        .map(|&t| {
            if t == 0.0 {
                0.0
            } else {
                (t / denom).powf(p / q) / c
            }
        })
        .collect()
}

/// Explicit solution of `min <zeta, z> + omega(zeta) + threshold ||zeta||_1`.
pub fn prox_pen_q1(setup: &ProximalSetup, z: &[C64], threshold: f64) -> Result<Vec<C64>> {
    if !(threshold >= 0.0) {
        return invalid(format!("threshold must be nonnegative, got {threshold}"));
    }
    if !setup.supports_complex_prox() || setup.dim() != 2 * z.len() {
        return invalid("setup does not match the complex coordinates of the prox problem");
    }
    let theta: Vec<f64> = z.iter().map(|v| soft(v.norm(), threshold)).collect();
    let mags = q1_magnitudes(setup, &theta);
    Ok(z.iter().zip(&mags).map(|(&zj, &a)| against(zj, a)).collect())
}

fn l1(z: &[C64]) -> f64 {
    z.iter().map(|v| v.norm()).sum()
}

/// Bisection for the root of a nonincreasing `f` on `[lo, hi]` with
/// `f(lo) >= 0 >= f(hi)`. Returns `(lo, hi)` after narrowing.
fn bisect(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    for _ in 0..ROOT_MAX_ITER {
        if hi - lo <= ROOT_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Solution of `min <zeta, z> + omega(zeta) + weight ||zeta||_1^2`.
///
/// For fixed `t` the stationarity condition with `||zeta||_1` replaced by `t`
/// is the `q = 1` problem with threshold `2 weight t`; the fixed point
/// `||zeta(t)||_1 = t` is found by bisection.
pub fn prox_pen_q2(setup: &ProximalSetup, z: &[C64], weight: f64) -> Result<Vec<C64>> {
    if !(weight >= 0.0) {
        return invalid(format!("penalty weight must be nonnegative, got {weight}"));
    }
    let at = |t: f64| prox_pen_q1(setup, z, 2.0 * weight * t);
    let free = at(0.0)?;
    if weight == 0.0 {
        return Ok(free);
    }
    let hi = l1(&free);
    if hi == 0.0 {
        return Ok(free);
    }
    if !hi.is_finite() {
        return Err(Error::Internal("root bracket for the squared penalty is not finite".into()));
    }
    let gap = |t: f64| at(t).map(|s| l1(&s) - t).unwrap_or(f64::NAN);
    if !(gap(hi) <= 0.0) {
        return Err(Error::Internal("root bracket for the squared penalty not found".into()));
    }
    let (lo, hi) = bisect(0.0, hi, gap);
    at(0.5 * (lo + hi))
}

/// Euclidean projection onto `{zeta : sum_j |zeta_j| <= radius}`.
///
/// Phases are kept and the magnitudes are projected onto the simplex-ball by
/// the sort-and-threshold rule.
pub fn project_l1_ball_complex(z: &[C64], radius: f64) -> Result<Vec<C64>> {
    if !(radius >= 0.0) {
        return invalid(format!("radius must be nonnegative, got {radius}"));
    }
    if l1(z) <= radius {
        return Ok(z.to_vec());
    }
    let mut mags: Vec<f64> = z.iter().map(|v| v.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &m) in mags.iter().enumerate() {
        cumsum += m;
        let candidate = (cumsum - radius) / (j + 1) as f64;
        if j == 0 || m > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    Ok(z.iter().map(|&v| -against(v, soft(v.norm(), theta))).collect())
}

pub fn project_l2_ball(z: &[C64], radius: f64) -> Result<Vec<C64>> {
    if !(radius >= 0.0) {
        return invalid(format!("radius must be nonnegative, got {radius}"));
    }
    let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm <= radius {
        return Ok(z.to_vec());
    }
    let s = radius / norm;
    Ok(z.iter().map(|v| v * s).collect())
}

/// Constrained prox `min <zeta, z> + omega(zeta)` over `||zeta||_1 <= radius`
/// through its Lagrangian dual: each multiplier `mu` gives a `q = 1` problem
/// with threshold `base_threshold + mu`, and `mu` is located by bisection.
pub fn prox_con_l1setup(
    setup: &ProximalSetup,
    z: &[C64],
    radius: f64,
    base_threshold: f64,
) -> Result<Vec<C64>> {
    if !(radius > 0.0) {
        return invalid(format!("radius must be positive, got {radius}"));
    }
    let free = prox_pen_q1(setup, z, base_threshold)?;
    if l1(&free) <= radius {
        return Ok(free);
    }
    let peak = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let hi = (peak - base_threshold).max(0.0);
    let excess = |mu: f64| {
        prox_pen_q1(setup, z, base_threshold + mu)
            .map(|s| l1(&s) - radius)
            .unwrap_or(f64::NAN)
    };
    let (_, hi) = bisect(0.0, hi, excess);
    prox_pen_q1(setup, z, base_threshold + hi)
}

/// `argmin_xi { <g, xi> + D_u(xi) + term(xi) }`.
pub fn prox_composite(
    setup: &ProximalSetup,
    center: &BregmanPoint,
    g: &SpectralVector,
    term: &ProxTerm,
) -> Result<SpectralVector> {
    setup.check_dim(g)?;
    setup.check_dim(center.point())?;
    if !setup.supports_complex_prox() {
        return invalid("prox-mappings need complex-pair blocks or a Euclidean setup");
    }
    let z = g.sub(center.dgf_grad()).to_complex();
    let euclid = setup.is_euclidean();
    let zeta = match *term {
        ProxTerm::None => prox_pen_q1(setup, &z, 0.0)?,
        ProxTerm::L1Penalty { weight, power: 1 } => prox_pen_q1(setup, &z, weight)?,
        ProxTerm::L1Penalty { weight, power: 2 } => prox_pen_q2(setup, &z, weight)?,
        ProxTerm::L1Penalty { power, .. } => {
            return invalid(format!("penalty power must be 1 or 2, got {power}"))
        }
        ProxTerm::L1Ball { radius } | ProxTerm::L1BallPenalty { radius, .. } => {
            let weight = match *term {
                ProxTerm::L1BallPenalty { weight, .. } => weight,
                _ => 0.0,
            };
            if !(weight >= 0.0) {
                return invalid(format!("penalty weight must be nonnegative, got {weight}"));
            }
            if radius == 0.0 {
                vec![C64::new(0.0, 0.0); z.len()]
            } else if euclid {
                let step = prox_pen_q1(setup, &z, weight)?;
                project_l1_ball_complex(&step, radius)?
            } else {
                prox_con_l1setup(setup, &z, radius, weight)?
            }
        }
        ProxTerm::L2Ball { radius } => {
            if !euclid {
                return invalid("l2-ball prox requires a Euclidean setup");
            }
            let step = prox_pen_q1(setup, &z, 0.0)?;
            project_l2_ball(&step, radius)?
        }
    };
    Ok(SpectralVector::from_complex(&zeta))
}
