//! Online accuracy certificates for bilinear composite saddle problems
//!
//! ```text
//! min_{u in U} max_{v in V} <v, A u - b> + lambda ||u||_{C,1},
//! U = {||u||_{C,1} <= R}  (or the whole space),  V = {||v||_{C,q} <= 1}.
//! ```
//!
//! The state keeps weighted running sums of the points `z_tau = [u_tau; v_tau]`
//! where the field was evaluated, of `F(z_tau) = [A^T v_tau; b - A u_tau]` and
//! of the penalty subgradients `h(u_tau)`. Since the field is affine, the
//! averaged field is the field at the averaged point: `F_v^t = b - A u^t` and
//! `F_u^t = A^T v^t`. Both the primal and the dual value at the averages are
//! therefore available without touching `A`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::signal::SpectralVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualBall {
    /// `||v||_{C,1} <= 1`; the primal residual is measured in `||.||_{C,inf}`.
    L1,
    /// `||v||_2 <= 1`; the primal residual is measured in `||.||_2`.
    L2,
}

impl DualBall {
    /// The norm dual to the ball's norm, as a complex `p`-norm exponent.
    pub fn residual_exponent(self) -> f64 {
        match self {
            DualBall::L1 => f64::INFINITY,
            DualBall::L2 => 2.0,
        }
    }

    /// `max_{v in V} <a, v>`.
    pub fn support(self, a: &SpectralVector) -> f64 {
        a.complex_norm(self.residual_exponent())
    }
}

/// Domains and penalty of a bilinear saddle problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaddleGeometry {
    /// `Some(R)` for the ball `||u||_{C,1} <= R`, `None` for the whole space.
    pub primal_radius: Option<f64>,
    /// `lambda >= 0` in `Psi(u) = lambda ||u||_{C,1}`.
    pub penalty: f64,
    pub dual: DualBall,
}

impl SaddleGeometry {
    pub fn new(primal_radius: Option<f64>, penalty: f64, dual: DualBall) -> Result<Self> {
        if let Some(r) = primal_radius {
            if !(r >= 0.0) {
                return invalid(format!("primal radius must be nonnegative, got {r}"));
            }
        }
        if !(penalty >= 0.0) {
            return invalid(format!("penalty must be nonnegative, got {penalty}"));
        }
        Ok(Self {
            primal_radius,
            penalty,
            dual,
        })
    }

    pub fn penalty_value(&self, u: &SpectralVector) -> f64 {
        if self.penalty == 0.0 {
            0.0
        } else {
            self.penalty * u.complex_l1()
        }
    }

    /// A subgradient of `Psi` at `u`: `lambda u_j / |u_j|` on nonzero pairs.
    pub fn penalty_subgradient(&self, u: &SpectralVector) -> SpectralVector {
        let mut h = SpectralVector::zeros(u.complex_len());
        if self.penalty == 0.0 {
            return h;
        }
        for (dst, src) in h
            .as_mut_slice()
            .chunks_exact_mut(2)
            .zip(u.as_slice().chunks_exact(2))
        {
            let r = src[0].hypot(src[1]);
            if r > 0.0 {
                dst[0] = self.penalty * src[0] / r;
                dst[1] = self.penalty * src[1] / r;
            }
        }
        h
    }

    /// `max_{u in U} [<a, u> - weight ||u||_{C,1}]`, possibly `+inf`.
    pub fn primal_support(&self, a: &SpectralVector, weight: f64) -> f64 {
        let excess = a.complex_linf() - weight;
        match self.primal_radius {
            Some(r) => r * excess.max(0.0),
            None if excess <= 0.0 => 0.0,
            None => f64::INFINITY,
        }
    }
}

/// One weighted point of the certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateEntry {
    pub u: SpectralVector,
    pub v: SpectralVector,
    pub field_u: SpectralVector,
    pub field_v: SpectralVector,
    pub subgradient: SpectralVector,
    pub weight: f64,
}

impl CertificateEntry {
    /// Builds the entry for a point with its field value; `h` is taken from
    /// the geometry.
    pub fn new(
        geometry: &SaddleGeometry,
        u: SpectralVector,
        v: SpectralVector,
        field_u: SpectralVector,
        field_v: SpectralVector,
        weight: f64,
    ) -> Self {
        let subgradient = geometry.penalty_subgradient(&u);
        Self {
            u,
            v,
            field_u,
            field_v,
            subgradient,
            weight,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateState {
    weight_total: f64,
    count: usize,
    sum_u: SpectralVector,
    sum_v: SpectralVector,
    sum_field_u: SpectralVector,
    sum_field_v: SpectralVector,
    sum_subgradient: SpectralVector,
    // sum gamma <h(u_tau), u_tau>
    sum_subgradient_inner: f64,
}

impl CertificateState {
    /// Empty state for primal and dual variables of real dimensions `dim_u`, `dim_v`.
    pub fn new(dim_u: usize, dim_v: usize) -> Self {
        let zu = SpectralVector::zeros(dim_u / 2);
        let zv = SpectralVector::zeros(dim_v / 2);
        Self {
            weight_total: 0.0,
            count: 0,
            sum_u: zu.clone(),
            sum_v: zv.clone(),
            sum_field_u: zu.clone(),
            sum_field_v: zv,
            sum_subgradient: zu,
            sum_subgradient_inner: 0.0,
        }
    }

    fn check(&self, e: &CertificateEntry) -> Result<()> {
        let du = self.sum_u.dim();
        let dv = self.sum_v.dim();
        if e.u.dim() != du || e.field_u.dim() != du || e.subgradient.dim() != du {
            return invalid("primal entry has the wrong dimension");
        }
        if e.v.dim() != dv || e.field_v.dim() != dv {
            return invalid("dual entry has the wrong dimension");
        }
        if !(e.weight > 0.0) || !e.weight.is_finite() {
            return invalid(format!("certificate weight must be positive, got {}", e.weight));
        }
        Ok(())
    }

    fn accumulate(&mut self, e: &CertificateEntry, sign: f64) {
        let g = sign * e.weight;
        self.weight_total += g;
        self.sum_u.axpy(g, &e.u);
        self.sum_v.axpy(g, &e.v);
        self.sum_field_u.axpy(g, &e.field_u);
        self.sum_field_v.axpy(g, &e.field_v);
        self.sum_subgradient.axpy(g, &e.subgradient);
        self.sum_subgradient_inner += g * e.subgradient.dot(&e.u);
    }

    pub fn update(&mut self, entry: &CertificateEntry) -> Result<()> {
        self.check(entry)?;
        self.accumulate(entry, 1.0);
        self.count += 1;
        Ok(())
    }

    /// Drops an entry previously added; used for suffix averaging.
    pub fn remove(&mut self, entry: &CertificateEntry) -> Result<()> {
        self.check(entry)?;
        if self.count == 0 {
            return invalid("cannot remove from an empty certificate");
        }
        self.accumulate(entry, -1.0);
        self.count -= 1;
        if self.count == 0 {
            *self = Self::new(self.sum_u.dim(), self.sum_v.dim());
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn weight_total(&self) -> f64 {
        self.weight_total
    }

    fn average(&self, sum: &SpectralVector) -> SpectralVector {
        if self.weight_total > 0.0 {
            sum.scaled(1.0 / self.weight_total)
        } else {
            SpectralVector::zeros(sum.complex_len())
        }
    }

    /// `u^t`.
    pub fn averaged_u(&self) -> SpectralVector {
        self.average(&self.sum_u)
    }

    /// `v^t`.
    pub fn averaged_v(&self) -> SpectralVector {
        self.average(&self.sum_v)
    }

    /// `F_u^t`.
    pub fn averaged_field_u(&self) -> SpectralVector {
        self.average(&self.sum_field_u)
    }

    /// `F_v^t`.
    pub fn averaged_field_v(&self) -> SpectralVector {
        self.average(&self.sum_field_v)
    }

    /// `h^t`.
    pub fn averaged_subgradient(&self) -> SpectralVector {
        self.average(&self.sum_subgradient)
    }

    fn averaged_subgradient_inner(&self) -> f64 {
        if self.weight_total > 0.0 {
            self.sum_subgradient_inner / self.weight_total
        } else {
            0.0
        }
    }

    /// `<F_u^t, u^t> + <F_v^t, v^t>`; equals `<v^t, b>` for an affine field.
    fn averaged_inner(&self) -> f64 {
        self.averaged_field_u().dot(&self.averaged_u()) + self.averaged_field_v().dot(&self.averaged_v())
    }

    /// `phi_bar(u^t) = ||A u^t - b||_{C,p} + Psi(u^t)`.
    pub fn primal_value(&self, geometry: &SaddleGeometry) -> f64 {
        geometry.dual.support(&self.averaged_field_v()) + geometry.penalty_value(&self.averaged_u())
    }

    /// `phi_under(v^t) = -<v^t, b> - max_u [<-A^T v^t, u> - Psi(u)]`, possibly `-inf`.
    pub fn dual_value(&self, geometry: &SaddleGeometry) -> f64 {
        -self.averaged_inner() - geometry.primal_support(&self.averaged_field_u(), geometry.penalty)
    }
}

/// Duality-gap bound with the penalty handled exactly:
///
/// ```text
/// max_u [-<F_u^t, u> - Psi(u)] + Psi(u^t) + max_v [-<F_v^t, v>]
///     + <F_u^t, u^t> + <F_v^t, v^t>.
/// ```
///
/// For a bilinear saddle function this is the duality gap at `(u^t, v^t)`.
/// Returns `+inf` when the primal domain is unbounded and `||F_u^t||_inf > lambda`,
/// and `0` for an empty state.
pub fn gap_bound(state: &CertificateState, geometry: &SaddleGeometry) -> f64 {
    if state.is_empty() {
        return 0.0;
    }
    let fu = state.averaged_field_u();
    let fv = state.averaged_field_v();
    let value = geometry.primal_support(&fu, geometry.penalty)
        + geometry.penalty_value(&state.averaged_u())
        + geometry.dual.support(&fv)
        + state.averaged_inner();
    value.max(0.0)
}

/// The linearized bound with the penalty replaced by its subgradients:
///
/// ```text
/// max_u [-<F_u^t + h^t, u>] + max_v [-<F_v^t, v>]
///     + <F_u^t, u^t> + <F_v^t, v^t> + sum_tau lambda_tau <h(u_tau), u_tau>.
/// ```
///
/// Never smaller than [`gap_bound`]. The subgradient term is paired with the
/// points `u_tau` themselves, which is what convexity of `Psi` supports.
pub fn linearized_gap_bound(state: &CertificateState, geometry: &SaddleGeometry) -> f64 {
    if state.is_empty() {
        return 0.0;
    }
    let mut a = state.averaged_field_u();
    a.axpy(1.0, &state.averaged_subgradient());
    let value = geometry.primal_support(&a, 0.0)
        + geometry.dual.support(&state.averaged_field_v())
        + state.averaged_inner()
        + state.averaged_subgradient_inner();
    value.max(0.0)
}

/// `gap_bound / phi_under(v^t)` when the dual value is positive, else `+inf`.
pub fn relative_accuracy(state: &CertificateState, geometry: &SaddleGeometry) -> f64 {
    let dual = state.dual_value(geometry);
    if dual > 0.0 {
        gap_bound(state, geometry) / dual
    } else {
        f64::INFINITY
    }
}
