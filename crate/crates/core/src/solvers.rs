//! First-order solvers: the fast gradient method for composite minimization
//! and composite mirror prox for bilinear composite saddle problems.

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::certificate::{gap_bound, CertificateEntry, CertificateState, DualBall, SaddleGeometry};
use crate::error::{invalid, Error, Result};
use crate::operator::LinearMap;
use crate::prox::{prox_composite, BregmanPoint, ProxTerm, ProximalSetup};
use crate::signal::SpectralVector;

/// Largest number of consecutive stepsize halvings in adaptive mirror prox.
pub const MAX_BACKTRACKS: usize = 50;
/// Stepsize growth after an accepted adaptive step.
pub const STEP_GROWTH: f64 = 1.2;
/// Cap on the adaptive stepsize relative to the initial one. Without it a
/// locally easy problem lets the stepsize grow until roundoff in `eta F`
/// swamps the prox steps.
pub const MAX_STEP_RATIO: f64 = 1e6;

// Degenerate constants (zero data, zero radius) are floored so that the
// iterations stay well defined; the iterates are then exactly zero.
const TINY: f64 = 1e-300;
const TINY_RADIUS: f64 = 1e-12;

pub trait SmoothObjective {
    fn dim(&self) -> usize;
    fn value(&self, u: &SpectralVector) -> f64;
    fn gradient(&self, u: &SpectralVector) -> SpectralVector;
    /// Lipschitz constant of the gradient w.r.t. the Euclidean norm.
    fn lipschitz(&self) -> f64;
}

/// `f(u) = 1/2 ||A u - b||_2^2`.
pub struct LeastSquares<'a> {
    map: &'a dyn LinearMap,
}

impl<'a> LeastSquares<'a> {
    pub fn new(map: &'a dyn LinearMap) -> Self {
        Self { map }
    }

    pub fn residual(&self, u: &SpectralVector) -> SpectralVector {
        self.map.apply(u).sub(self.map.offset())
    }
}

impl SmoothObjective for LeastSquares<'_> {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn value(&self, u: &SpectralVector) -> f64 {
        let r = self.residual(u).norm2();
        0.5 * r * r
    }

    fn gradient(&self, u: &SpectralVector) -> SpectralVector {
        self.map.apply_adjoint(&self.residual(u))
    }

    fn lipschitz(&self) -> f64 {
        let b = self.map.norm_bound();
        b * b
    }
}

/// `Psi(u)` for a prox term; constraints contribute nothing on their domain.
pub fn term_value(term: &ProxTerm, u: &SpectralVector) -> f64 {
    match *term {
        ProxTerm::L1Penalty { weight, power: 2 } => {
            let s = u.complex_l1();
            weight * s * s
        }
        ProxTerm::L1Penalty { weight, .. } | ProxTerm::L1BallPenalty { weight, .. } => {
            if weight == 0.0 {
                0.0
            } else {
                weight * u.complex_l1()
            }
        }
        ProxTerm::None | ProxTerm::L1Ball { .. } | ProxTerm::L2Ball { .. } => 0.0,
    }
}

/// Radius of the ball in the term, if any.
pub fn term_radius(term: &ProxTerm) -> Option<f64> {
    match *term {
        ProxTerm::L1Ball { radius } | ProxTerm::L1BallPenalty { radius, .. } | ProxTerm::L2Ball { radius } => {
            Some(radius)
        }
        _ => None,
    }
}

/// `max_s [-<g, s> - Psi(s)]` over the term's domain, possibly `+inf`.
fn term_conjugate(term: &ProxTerm, g: &SpectralVector) -> f64 {
    let linf = g.complex_linf();
    let unbounded = |excess: f64| if excess <= 0.0 { 0.0 } else { f64::INFINITY };
    match *term {
        ProxTerm::None => unbounded(linf),
        ProxTerm::L1Ball { radius } => radius * linf,
        ProxTerm::L1BallPenalty { radius, weight } => radius * (linf - weight).max(0.0),
        ProxTerm::L2Ball { radius } => radius * g.norm2(),
        ProxTerm::L1Penalty { weight, power: 2 } => {
            if weight > 0.0 {
                linf * linf / (4.0 * weight)
            } else {
                unbounded(linf)
            }
        }
        ProxTerm::L1Penalty { weight, .. } => unbounded(linf - weight),
    }
}

/// `min_u f(u) + Psi(u)` with `f` smooth and `Psi` given by a prox term.
pub struct CompositeProblem<'a> {
    smooth: &'a dyn SmoothObjective,
    setup: ProximalSetup,
    term: ProxTerm,
    lipschitz: f64,
    solution_radius: Option<f64>,
}

impl<'a> CompositeProblem<'a> {
    pub fn new(smooth: &'a dyn SmoothObjective, setup: ProximalSetup, term: ProxTerm) -> Result<Self> {
        if smooth.dim() != setup.dim() {
            return invalid(format!(
                "objective has dimension {}, setup has {}",
                smooth.dim(),
                setup.dim()
            ));
        }
        Ok(Self {
            smooth,
            lipschitz: smooth.lipschitz(),
            setup,
            term,
            solution_radius: None,
        })
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = lipschitz;
        self
    }

    /// A bound on `||u*||` used for the a-priori bound when there is no ball.
    pub fn with_solution_radius(mut self, radius: f64) -> Self {
        self.solution_radius = Some(radius);
        self
    }

    pub fn setup(&self) -> &ProximalSetup {
        &self.setup
    }

    pub fn term(&self) -> &ProxTerm {
        &self.term
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn objective(&self, u: &SpectralVector) -> f64 {
        self.smooth.value(u) + term_value(&self.term, u)
    }

    /// The omega-radius of the domain, or of a ball known to contain `u*`.
    pub fn omega_radius(&self) -> Option<f64> {
        let r = match (term_radius(&self.term), self.solution_radius) {
            (Some(a), Some(b)) => a.min(b),
            (a, b) => a.or(b)?,
        };
        self.setup.omega_radius_bound(r).ok()
    }

    /// `4 L_f Omega^2 / T^2`, or `+inf` without a radius.
    pub fn apriori_bound(&self, iterations: usize) -> f64 {
        match self.omega_radius() {
            Some(o) if iterations > 0 => 4.0 * self.lipschitz * o * o / (iterations as f64).powi(2),
            _ => f64::INFINITY,
        }
    }

    /// Upper bound on `phi(u) - phi*` from the linearization of `f` at `u`:
    /// `<grad f(u), u> + Psi(u) + max_s [-<grad f(u), s> - Psi(s)]`.
    pub fn linearization_gap(&self, u: &SpectralVector) -> f64 {
        let g = self.smooth.gradient(u);
        let v = g.dot(u) + term_value(&self.term, u) + term_conjugate(&self.term, &g);
        v.max(0.0)
    }

    pub fn default_stepsize(&self) -> f64 {
        1.0 / self.lipschitz.max(TINY)
    }
}

/// Accuracy target of a stopping rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tolerance {
    Absolute(f64),
    /// `epsilon = numerator / objective`, re-evaluated at every iteration.
    OverObjective(f64),
}

impl Tolerance {
    pub fn threshold(&self, objective: f64) -> f64 {
        match *self {
            Tolerance::Absolute(eps) => eps,
            Tolerance::OverObjective(num) => {
                if objective > 0.0 {
                    num / objective
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StoppingRule {
    /// Run the full iteration budget.
    Budget,
    /// Stop once the online bound reaches the tolerance; falls back to the
    /// a-priori bound when the online bound is unavailable or infinite.
    Certificate(Tolerance),
    /// Stop once the a-priori rate bound reaches the tolerance.
    Apriori(Tolerance),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Budget,
    Certificate,
    Apriori,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Averaging {
    Uniform,
    /// Average over the last `fraction` of the iterates.
    Suffix(f64),
}

impl Default for Averaging {
    fn default() -> Self {
        Averaging::Uniform
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Number of completed iterations.
    pub iteration: usize,
    /// Objective (FGM) or primal value (mirror prox) at the returned point.
    pub objective: f64,
    /// Online upper bound on the accuracy, when computed.
    pub certificate: Option<f64>,
    pub apriori: f64,
    pub stepsize: f64,
    /// Seconds since the solve started.
    pub elapsed: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveTrace {
    pub records: Vec<IterationRecord>,
    /// The returned approximate solution (`u^T` for FGM, the averaged `u^T`
    /// for mirror prox).
    pub solution: SpectralVector,
    /// Averaged dual point (mirror prox only).
    pub dual_solution: Option<SpectralVector>,
    pub last_iterate: SpectralVector,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub backtracks: usize,
    pub final_stepsize: f64,
}

impl SolveTrace {
    fn empty(dim: usize, dual: bool, eta: f64) -> Self {
        let z = SpectralVector::zeros(dim / 2);
        Self {
            records: Vec::new(),
            solution: z.clone(),
            dual_solution: dual.then(|| z.clone()),
            last_iterate: z,
            stop_reason: StopReason::Budget,
            iterations: 0,
            backtracks: 0,
            final_stepsize: eta,
        }
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }
}

/// Called after each iteration with its record, the current solution and,
/// for mirror prox, the current averaged dual point.
pub type Observer<'o> = dyn FnMut(&IterationRecord, &SpectralVector, Option<&SpectralVector>) + 'o;

fn should_stop(stop: &StoppingRule, objective: f64, certificate: Option<f64>, apriori: f64) -> Option<StopReason> {
    match stop {
        StoppingRule::Budget => None,
        StoppingRule::Certificate(tol) => {
            let thr = tol.threshold(objective);
            match certificate {
                Some(c) if c.is_finite() => (c <= thr).then_some(StopReason::Certificate),
                _ => (apriori <= thr).then_some(StopReason::Apriori),
            }
        }
        StoppingRule::Apriori(tol) => (apriori <= tol.threshold(objective)).then_some(StopReason::Apriori),
    }
}

fn diverged(iteration: usize, what: &str) -> Error {
    Error::Diverged {
        iteration,
        reason: format!("non-finite {what}"),
    }
}

/// Fast gradient method.
///
/// With `a_t = (t+2)/2` and `A_t = sum_{s<t} a_s = t(t+3)/4`, iteration `t`
/// computes
///
/// ```text
/// u_t       = argmin <eta g^t, xi> + omega(xi) + eta A_t Psi(xi)
/// u_{t+1/3} = tau_t u_t + (1 - tau_t) u^t,        tau_t = a_t / A_{t+1}
/// g_t       = a_t grad f(u_{t+1/3})
/// u_{t+2/3} = argmin <eta g_t, xi> + D_{u_t}(xi) + eta a_t Psi(xi)
/// u^{t+1}   = tau_t u_{t+2/3} + (1 - tau_t) u^t,  g^{t+1} = g^t + g_t
/// ```
///
/// The penalty carries the same weights as the gradients it is paired with.
pub fn fgm_run(problem: &CompositeProblem, eta: f64, max_iter: usize, stop: &StoppingRule) -> Result<SolveTrace> {
    fgm_run_observed(problem, eta, max_iter, stop, None)
}

pub fn fgm_run_observed(
    problem: &CompositeProblem,
    eta: f64,
    max_iter: usize,
    stop: &StoppingRule,
    mut observer: Option<&mut Observer<'_>>,
) -> Result<SolveTrace> {
    if !(eta > 0.0) || !eta.is_finite() {
        return invalid(format!("stepsize must be positive and finite, got {eta}"));
    }
    let setup = problem.setup();
    let start = Instant::now();
    let mut trace = SolveTrace::empty(setup.dim(), false, eta);
    let origin = BregmanPoint::center(setup);
    let mut u_bar = SpectralVector::zeros(setup.dim() / 2);
    let mut g_acc = SpectralVector::zeros(setup.dim() / 2);
    let mut u_t = u_bar.clone();
    let want_certificate = matches!(stop, StoppingRule::Certificate(_));

    for t in 0..max_iter {
        let tf = t as f64;
        let a_t = (tf + 2.0) / 2.0;
        let big_a = tf * (tf + 3.0) / 4.0;
        let tau = 2.0 * (tf + 2.0) / ((tf + 1.0) * (tf + 4.0));

        u_t = prox_composite(setup, &origin, &g_acc.scaled(eta), &problem.term.scale_penalty(eta * big_a))?;
        let u13 = u_t.combine(tau, &u_bar, 1.0 - tau);
        let grad = problem.smooth.gradient(&u13);
        if !grad.is_finite() {
            return Err(diverged(t, "gradient"));
        }
        let g_t = grad.scaled(a_t);
        let center = BregmanPoint::new(setup, u_t.clone())?;
        let u23 = prox_composite(setup, &center, &g_t.scaled(eta), &problem.term.scale_penalty(eta * a_t))?;
        u_bar = u23.combine(tau, &u_bar, 1.0 - tau);
        g_acc.axpy(1.0, &g_t);

        let objective = problem.objective(&u_bar);
        if !objective.is_finite() {
            return Err(diverged(t, "objective"));
        }
        let certificate = want_certificate.then(|| problem.linearization_gap(&u_bar));
        let record = IterationRecord {
            iteration: t + 1,
            objective,
            certificate,
            apriori: problem.apriori_bound(t + 1),
            stepsize: eta,
            elapsed: start.elapsed().as_secs_f64(),
        };
        if let Some(obs) = observer.as_deref_mut() {
            obs(&record, &u_bar, None);
        }
        let reason = should_stop(stop, record.objective, record.certificate, record.apriori);
        trace.records.push(record);
        trace.iterations = t + 1;
        if let Some(r) = reason {
            trace.stop_reason = r;
            break;
        }
    }
    trace.last_iterate = u_t;
    trace.solution = u_bar;
    Ok(trace)
}

/// `min_{u in U} max_{v in V} <v, A u - b> + Psi(u)` with the joint setup
///
/// ```text
/// omega(u, v) = Omega_V^2 omega_U(u) + Omega_U^2 omega_V(v).
/// ```
pub struct SaddleProblem<'a> {
    map: &'a dyn LinearMap,
    geometry: SaddleGeometry,
    setup_u: ProximalSetup,
    setup_v: ProximalSetup,
    omega_u: f64,
    omega_v: f64,
    lipschitz: f64,
}

impl<'a> SaddleProblem<'a> {
    /// `solution_radius` bounds `||u*||_{C,1}`; it is required when the primal
    /// domain is unbounded and tightens `Omega_U` otherwise.
    pub fn new(
        map: &'a dyn LinearMap,
        geometry: SaddleGeometry,
        setup_u: ProximalSetup,
        setup_v: ProximalSetup,
        solution_radius: Option<f64>,
    ) -> Result<Self> {
        if setup_u.dim() != map.dim() || setup_v.dim() != map.dim() {
            return invalid("setups must match the dimension of the map");
        }
        if geometry.dual == DualBall::L2 && setup_v.q_tilde() != 2.0 {
            return invalid("an l2 dual ball needs a Euclidean dual setup");
        }
        let radius = match (geometry.primal_radius, solution_radius) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => return invalid("unbounded primal domain needs a bound on the solution"),
        };
        let omega_u = setup_u.omega_radius_bound(radius)?.max(TINY_RADIUS);
        let omega_v = setup_v.omega_radius_bound(1.0)?;
        Ok(Self {
            lipschitz: map.norm_bound(),
            map,
            geometry,
            setup_u,
            setup_v,
            omega_u,
            omega_v,
        })
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = lipschitz;
        self
    }

    pub fn geometry(&self) -> &SaddleGeometry {
        &self.geometry
    }

    pub fn map(&self) -> &dyn LinearMap {
        self.map
    }

    pub fn omega_u(&self) -> f64 {
        self.omega_u
    }

    pub fn omega_v(&self) -> f64 {
        self.omega_v
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// `Omega_U Omega_V / L_F`, the reciprocal Lipschitz constant of the field
    /// in the joint norm.
    pub fn default_stepsize(&self) -> f64 {
        self.omega_u * self.omega_v / self.lipschitz.max(TINY)
    }

    /// `L_F Omega_U Omega_V / T`.
    pub fn apriori_bound(&self, iterations: usize) -> f64 {
        if iterations == 0 {
            return f64::INFINITY;
        }
        self.lipschitz * self.omega_u * self.omega_v / iterations as f64
    }

    /// `F(u, v) = [A^T v; b - A u]`.
    pub fn field(&self, u: &SpectralVector, v: &SpectralVector) -> (SpectralVector, SpectralVector) {
        let fu = self.map.apply_adjoint(v);
        let fv = self.map.offset().sub(&self.map.apply(u));
        (fu, fv)
    }

    fn u_term(&self) -> ProxTerm {
        let lambda = self.geometry.penalty;
        match self.geometry.primal_radius {
            Some(radius) if lambda > 0.0 => ProxTerm::L1BallPenalty { radius, weight: lambda },
            Some(radius) => ProxTerm::L1Ball { radius },
            None if lambda > 0.0 => ProxTerm::L1Penalty { weight: lambda, power: 1 },
            None => ProxTerm::None,
        }
    }

    fn v_term(&self) -> ProxTerm {
        match self.geometry.dual {
            DualBall::L1 => ProxTerm::L1Ball { radius: 1.0 },
            DualBall::L2 => ProxTerm::L2Ball { radius: 1.0 },
        }
    }

    fn step(
        &self,
        cu: &BregmanPoint,
        cv: &BregmanPoint,
        fu: &SpectralVector,
        fv: &SpectralVector,
        eta: f64,
    ) -> Result<(SpectralVector, SpectralVector)> {
        let su = eta / (self.omega_v * self.omega_v);
        let sv = eta / (self.omega_u * self.omega_u);
        let u = prox_composite(&self.setup_u, cu, &fu.scaled(su), &self.u_term().scale_penalty(su))?;
        let v = prox_composite(&self.setup_v, cv, &fv.scaled(sv), &self.v_term())?;
        Ok((u, v))
    }

    fn joint_dgf_scale(&self, cu: &BregmanPoint, cv: &BregmanPoint, u: &SpectralVector, v: &SpectralVector) -> Result<f64> {
        Ok(self.omega_v * self.omega_v * (cu.dgf_value() + self.setup_u.dgf(u)?)
            + self.omega_u * self.omega_u * (cv.dgf_value() + self.setup_v.dgf(v)?))
    }

    fn joint_bregman(&self, cu: &BregmanPoint, cv: &BregmanPoint, u: &SpectralVector, v: &SpectralVector) -> Result<f64> {
        Ok(self.omega_v * self.omega_v * self.setup_u.bregman(cu, u)?
            + self.omega_u * self.omega_u * self.setup_v.bregman(cv, v)?)
    }
}

/// Composite mirror prox with a constant stepsize.
///
/// The field is evaluated at the extragradient points `w_{t+1/2}`; those are
/// the points averaged into the returned solution and into the certificate
/// (weights equal to the stepsize).
pub fn cmp_run(
    problem: &SaddleProblem,
    eta: f64,
    max_iter: usize,
    stop: &StoppingRule,
    averaging: Averaging,
) -> Result<SolveTrace> {
    cmp_core(problem, eta, max_iter, stop, averaging, false, None)
}

pub fn cmp_run_observed(
    problem: &SaddleProblem,
    eta: f64,
    max_iter: usize,
    stop: &StoppingRule,
    averaging: Averaging,
    observer: Option<&mut Observer<'_>>,
) -> Result<SolveTrace> {
    cmp_core(problem, eta, max_iter, stop, averaging, false, observer)
}

/// Mirror prox with backtracking: a step is accepted when
///
/// ```text
/// eta [<F(w_{t+1/2}), w_{t+1/2} - w_{t+1}> + Psi(u_{t+1/2}) - Psi(u_{t+1})] <= D_{w_t}(w_{t+1}),
/// ```
///
/// otherwise `eta` is halved and the step retried. Accepted steps grow `eta`
/// by [`STEP_GROWTH`] up to [`MAX_STEP_RATIO`] times the initial stepsize,
/// which is the default one.
pub fn cmp_run_adaptive(
    problem: &SaddleProblem,
    max_iter: usize,
    stop: &StoppingRule,
    averaging: Averaging,
) -> Result<SolveTrace> {
    cmp_core(problem, problem.default_stepsize(), max_iter, stop, averaging, true, None)
}

/// Adaptive mirror prox from a chosen initial stepsize.
pub fn cmp_run_adaptive_from(
    problem: &SaddleProblem,
    eta: f64,
    max_iter: usize,
    stop: &StoppingRule,
    averaging: Averaging,
    observer: Option<&mut Observer<'_>>,
) -> Result<SolveTrace> {
    cmp_core(problem, eta, max_iter, stop, averaging, true, observer)
}

fn cmp_core(
    problem: &SaddleProblem,
    eta0: f64,
    max_iter: usize,
    stop: &StoppingRule,
    averaging: Averaging,
    adaptive: bool,
    mut observer: Option<&mut Observer<'_>>,
) -> Result<SolveTrace> {
    if !(eta0 > 0.0) || !eta0.is_finite() {
        return invalid(format!("stepsize must be positive and finite, got {eta0}"));
    }
    let suffix = match averaging {
        Averaging::Uniform => None,
        Averaging::Suffix(f) if f > 0.0 && f <= 1.0 => Some(f),
        Averaging::Suffix(f) => return invalid(format!("suffix fraction must lie in (0, 1], got {f}")),
    };
    let dim = problem.map.dim();
    let geometry = problem.geometry;
    let start = Instant::now();
    let mut trace = SolveTrace::empty(dim, true, eta0);
    let mut u = SpectralVector::zeros(dim / 2);
    let mut v = SpectralVector::zeros(dim / 2);
    let mut cert = CertificateState::new(dim, dim);
    let mut window: VecDeque<CertificateEntry> = VecDeque::new();
    let mut eta = eta0;

    for t in 0..max_iter {
        let (fu, fv) = problem.field(&u, &v);
        if !fu.is_finite() || !fv.is_finite() {
            return Err(diverged(t, "field"));
        }
        let cu = BregmanPoint::new(&problem.setup_u, u.clone())?;
        let cv = BregmanPoint::new(&problem.setup_v, v.clone())?;
        let mut retries = 0;
        let (uh, vh, fuh, fvh, un, vn) = loop {
            let (uh, vh) = problem.step(&cu, &cv, &fu, &fv, eta)?;
            let (fuh, fvh) = problem.field(&uh, &vh);
            let (un, vn) = problem.step(&cu, &cv, &fuh, &fvh, eta)?;
            if !adaptive {
                break (uh, vh, fuh, fvh, un, vn);
            }
            let lin = fuh.dot(&uh.sub(&un)) + fvh.dot(&vh.sub(&vn));
            let psi = geometry.penalty_value(&uh) - geometry.penalty_value(&un);
            let div = problem.joint_bregman(&cu, &cv, &un, &vn)?;
            let delta = eta * (lin + psi) - div;
            // Roundoff in the divergence scales with the d.-g.f. values it cancels.
            let scale = problem.joint_dgf_scale(&cu, &cv, &un, &vn)?;
            let slack = 1e-10 * (eta * (lin.abs() + psi.abs()) + scale);
            if delta <= slack {
                break (uh, vh, fuh, fvh, un, vn);
            }
            retries += 1;
            trace.backtracks += 1;
            if retries > MAX_BACKTRACKS {
                return Err(Error::Diverged {
                    iteration: t,
                    reason: format!("stepsize backtracking exceeded {MAX_BACKTRACKS} halvings"),
                });
            }
            eta *= 0.5;
        };

        let entry = CertificateEntry::new(&geometry, uh, vh, fuh, fvh, eta);
        cert.update(&entry)?;
        if let Some(frac) = suffix {
            window.push_back(entry);
            let keep = ((frac * (t + 1) as f64).ceil() as usize).max(1);
            while window.len() > keep {
                let old = window.pop_front().expect("window is nonempty");
                cert.remove(&old)?;
            }
        }
        u = un;
        v = vn;

        let objective = cert.primal_value(&geometry);
        if !objective.is_finite() {
            return Err(diverged(t, "primal value"));
        }
        let record = IterationRecord {
            iteration: t + 1,
            objective,
            certificate: Some(gap_bound(&cert, &geometry)),
            apriori: problem.apriori_bound(t + 1),
            stepsize: eta,
            elapsed: start.elapsed().as_secs_f64(),
        };
        if adaptive {
            eta = (eta * STEP_GROWTH).min(MAX_STEP_RATIO * eta0);
        }
        if let Some(obs) = observer.as_deref_mut() {
            obs(&record, &cert.averaged_u(), Some(&cert.averaged_v()));
        }
        let reason = should_stop(stop, record.objective, record.certificate, record.apriori);
        trace.records.push(record);
        trace.iterations = t + 1;
        if let Some(r) = reason {
            trace.stop_reason = r;
            break;
        }
    }
    if !cert.is_empty() {
        trace.solution = cert.averaged_u();
        trace.dual_solution = Some(cert.averaged_v());
    }
    trace.last_iterate = u;
    trace.final_stepsize = eta;
    Ok(trace)
}
