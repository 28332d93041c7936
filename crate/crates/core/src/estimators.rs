//! Convolution-type estimators.
//!
//! Each estimator fits a filter `phi` on `[0, n]` by a convex program over
//! its spectral coordinates `u = Vec F_n[phi]`:
//!
//! | kind          | program                                         | solver |
//! |---------------|-------------------------------------------------|--------|
//! | `con-uf`      | `min ||A u - b||_{C,inf}`, `||u||_1 <= R`       | CMP    |
//! | `con-ls`      | `min 1/2 ||A u - b||_2^2`, `||u||_1 <= R`       | FGM    |
//! | `pen-uf`      | `min ||A u - b||_{C,inf} + lambda ||u||_1`      | CMP    |
//! | `pen-ls`      | `min 1/2 ||A u - b||_2^2 + lambda ||u||_1`      | FGM    |
//! | `con-ls-star` | `min ||A u - b||_2`, `||u||_1 <= R`             | CMP    |
//! | `pen-ls-star` | `min ||A u - b||_2 + lambda ||u||_1`            | CMP    |
//!
//! with `R = r_bar / sqrt(n+1)`. Norms on `u` are complex `l1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificate::{DualBall, SaddleGeometry};
use crate::error::{invalid, Error, Result};
use crate::operator::{ConvolutionOperator, LinearMap};
use crate::prox::{ProxTerm, ProximalSetup};
use crate::signal::{idft, ComplexSignal, SpectralVector};
use crate::solvers::{
    cmp_run_adaptive_from, cmp_run_observed, fgm_run_observed, Averaging, CompositeProblem, LeastSquares,
    Observer, SaddleProblem, SolveTrace, StoppingRule, Tolerance,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    ConUf,
    ConLs,
    PenUf,
    PenLs,
    ConLsStar,
    PenLsStar,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 6] = [
        EstimatorKind::ConUf,
        EstimatorKind::ConLs,
        EstimatorKind::PenUf,
        EstimatorKind::PenLs,
        EstimatorKind::ConLsStar,
        EstimatorKind::PenLsStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::ConUf => "con-uf",
            EstimatorKind::ConLs => "con-ls",
            EstimatorKind::PenUf => "pen-uf",
            EstimatorKind::PenLs => "pen-ls",
            EstimatorKind::ConLsStar => "con-ls-star",
            EstimatorKind::PenLsStar => "pen-ls-star",
        }
    }

    pub fn is_constrained(self) -> bool {
        matches!(self, EstimatorKind::ConUf | EstimatorKind::ConLs | EstimatorKind::ConLsStar)
    }

    pub fn is_uniform_fit(self) -> bool {
        matches!(self, EstimatorKind::ConUf | EstimatorKind::PenUf)
    }

    /// Squared least-squares kinds, solved by FGM.
    pub fn uses_fgm(self) -> bool {
        matches!(self, EstimatorKind::ConLs | EstimatorKind::PenLs)
    }

    pub fn is_starred(self) -> bool {
        matches!(self, EstimatorKind::ConLsStar | EstimatorKind::PenLsStar)
    }

    /// Dual ball of the saddle reformulation (mirror-prox kinds only).
    pub fn dual_ball(self) -> Option<DualBall> {
        if self.is_uniform_fit() {
            Some(DualBall::L1)
        } else if self.is_starred() {
            Some(DualBall::L2)
        } else {
            None
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown estimator kind '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetupChoice {
    L1,
    #[default]
    L2,
}

impl SetupChoice {
    pub fn build(self, complex_len: usize) -> Result<ProximalSetup> {
        match self {
            SetupChoice::L1 => ProximalSetup::complex_l1(complex_len),
            SetupChoice::L2 => ProximalSetup::l2(complex_len),
        }
    }
}

impl FromStr for SetupChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(SetupChoice::L1),
            "l2" => Ok(SetupChoice::L2),
            _ => Err(Error::Config(format!("unknown setup '{s}', expected l1 or l2"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lambda {
    Auto,
    Value(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stopping {
    /// Run `max_iter` iterations.
    Budget,
    /// Stop at a fixed absolute accuracy.
    Accuracy(f64),
    /// Stop at `factor` times the statistical accuracy.
    Statistical { factor: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    pub r_bar: Option<f64>,
    pub lambda: Option<Lambda>,
    pub sigma: Option<f64>,
    pub delta: f64,
    pub setup_u: SetupChoice,
    pub setup_v: SetupChoice,
    pub stopping: Stopping,
    pub max_iter: usize,
    /// Overrides the default stepsize (initial stepsize when adaptive).
    pub stepsize: Option<f64>,
    pub averaging: Averaging,
    pub adaptive: bool,
    /// The constant `c` in `epsilon* = c sigma r` or `c sigma^2 r^2`.
    pub accuracy_constant: f64,
}

impl EstimatorConfig {
    pub fn new(kind: EstimatorKind) -> Self {
        Self {
            kind,
            r_bar: None,
            lambda: None,
            sigma: None,
            delta: 0.05,
            setup_u: SetupChoice::L2,
            setup_v: SetupChoice::L2,
            stopping: Stopping::Budget,
            max_iter: 1000,
            stepsize: None,
            averaging: Averaging::Uniform,
            adaptive: false,
            accuracy_constant: 1.0,
        }
    }

    pub fn with_r_bar(mut self, r_bar: f64) -> Self {
        self.r_bar = Some(r_bar);
        self
    }

    pub fn with_lambda(mut self, lambda: Lambda) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn with_setups(mut self, u: SetupChoice, v: SetupChoice) -> Self {
        self.setup_u = u;
        self.setup_v = v;
        self
    }

    pub fn with_stopping(mut self, stopping: Stopping) -> Self {
        self.stopping = stopping;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_adaptive(mut self, adaptive: bool) -> Self {
        self.adaptive = adaptive;
        self
    }

    fn sigma_checked(&self, what: &str) -> Result<f64> {
        match self.sigma {
            Some(s) if s > 0.0 => Ok(s),
            _ => Err(Error::Config(format!("{what} needs a positive sigma"))),
        }
    }

    fn r_bar_checked(&self, what: &str) -> Result<f64> {
        match self.r_bar {
            Some(r) if r >= 0.0 => Ok(r),
            Some(r) => Err(Error::Config(format!("r_bar must be nonnegative, got {r}"))),
            None => Err(Error::Config(format!("{what} needs r_bar"))),
        }
    }

    /// The penalty actually used (penalized kinds only).
    pub fn resolve_lambda(&self, n: usize) -> Result<Option<f64>> {
        if self.kind.is_constrained() {
            return Ok(None);
        }
        let lambda = match self.lambda {
            None => return Err(Error::Config(format!("{} needs lambda (a value or auto)", self.kind))),
            Some(Lambda::Value(l)) => l,
            Some(Lambda::Auto) => {
                let sigma = self.sigma_checked("automatic lambda")?;
                match self.kind {
                    EstimatorKind::PenUf => default_lambda_uf(sigma, n, self.delta)?,
                    EstimatorKind::PenLs => default_lambda_ls(sigma, n, self.delta)?,
                    _ => {
                        return Err(Error::Config(format!(
                            "{} has no automatic lambda; give a value",
                            self.kind
                        )))
                    }
                }
            }
        };
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Config(format!("lambda must be positive and finite, got {lambda}")));
        }
        Ok(Some(lambda))
    }

    /// The solver stopping rule and the accuracy target it encodes.
    fn stopping_rule(&self) -> Result<(StoppingRule, Option<f64>)> {
        let kind = self.kind;
        match self.stopping {
            Stopping::Budget => Ok((StoppingRule::Budget, None)),
            Stopping::Accuracy(eps) => {
                if !(eps > 0.0) {
                    return Err(Error::Config(format!("accuracy must be positive, got {eps}")));
                }
                // FGM's online bound is the linearization gap
                Ok((StoppingRule::Certificate(Tolerance::Absolute(eps)), Some(eps)))
            }
            Stopping::Statistical { factor } => {
                if !(factor > 0.0) {
                    return Err(Error::Config(format!("accuracy factor must be positive, got {factor}")));
                }
                let sigma = self.sigma_checked("statistical stopping")?;
                let r = self.r_bar_checked("statistical stopping")?;
                let eps = factor * statistical_accuracy(kind, sigma, r, self.accuracy_constant);
                let rule = if kind.uses_fgm() {
                    StoppingRule::Apriori(Tolerance::Absolute(eps))
                } else if kind.is_starred() {
                    StoppingRule::Certificate(Tolerance::OverObjective(eps))
                } else {
                    StoppingRule::Certificate(Tolerance::Absolute(eps))
                };
                Ok((rule, Some(eps)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorSolution {
    pub kind: EstimatorKind,
    /// `u_hat`.
    pub filter_spectral: SpectralVector,
    /// `phi = F_n^H[Vec^H u_hat]` on `[0, n]`.
    pub filter_time: ComplexSignal,
    /// `[phi * y]_0^n`.
    pub denoised: ComplexSignal,
    pub trace: SolveTrace,
    /// `sqrt(n+1) ||F_n[phi]||_1`.
    pub r_realized: f64,
    pub lambda: Option<f64>,
    /// `R = r_bar / sqrt(n+1)` for constrained kinds.
    pub radius: Option<f64>,
    /// Accuracy target of the stopping rule; for starred kinds the numerator
    /// of `epsilon = target / objective`.
    pub epsilon: Option<f64>,
    pub stopping_rule: StoppingRule,
}

/// The filter on `[0, n]` with spectral coordinates `u`.
pub fn filter_from_spectral(u: &SpectralVector) -> Result<ComplexSignal> {
    ComplexSignal::one_sided(idft(&u.to_complex())?)
}

/// `[phi * y]_0^n` for the filter with spectral coordinates `u`, via `A u`.
pub fn denoise_spectral(op: &ConvolutionOperator, u: &SpectralVector) -> Result<ComplexSignal> {
    let au = op.apply(u)?;
    ComplexSignal::one_sided(idft(&au.to_complex())?)
}

/// `Res_p = ||A u - b||_{C,p}` for `p` in `{2, inf}`.
pub fn residual(op: &dyn LinearMap, u: &SpectralVector, p: f64) -> Result<f64> {
    if p != 2.0 && p != f64::INFINITY {
        return invalid(format!("residual norm must be 2 or inf, got {p}"));
    }
    if u.dim() != op.dim() {
        return invalid("dimension mismatch");
    }
    Ok(op.apply(u).sub(op.offset()).complex_norm(p))
}

/// `phi_bar(u) = ||A u - b||_{C,p} + lambda ||u||_{C,1}`, with `p` dual to the
/// dual ball. Feasibility of `u` is not checked.
pub fn primal_value(op: &dyn LinearMap, geometry: &SaddleGeometry, u: &SpectralVector) -> f64 {
    geometry.dual.support(&op.apply(u).sub(op.offset())) + geometry.penalty_value(u)
}

/// `phi_under(v) = -<v, b> - max_{u in U} [-<A^T v, u> - lambda ||u||_{C,1}]`,
/// i.e. `-<v, b> - R (||A^T v||_inf - lambda)_+` on a ball and `-inf` past the
/// penalty on the whole space.
pub fn dual_value(op: &dyn LinearMap, geometry: &SaddleGeometry, v: &SpectralVector) -> f64 {
    let atv = op.apply_adjoint(v);
    -v.dot(op.offset()) - geometry.primal_support(&atv, geometry.penalty)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("delta must lie in (0, 1), got {delta}"));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return invalid(format!("sigma must be positive, got {sigma}"));
    }
    Ok(())
}

/// `16 sigma sqrt((n+1)(1 + log((n+1)/delta)))`.
pub fn default_lambda_uf(sigma: f64, n: usize, delta: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_delta(delta)?;
    let m = (n + 1) as f64;
    Ok(16.0 * sigma * (m * (1.0 + (m / delta).ln())).sqrt())
}

/// `8 sqrt(2) sigma^2 sqrt(n+1) (2 + log(8(n+1)/delta))`.
pub fn default_lambda_ls(sigma: f64, n: usize, delta: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_delta(delta)?;
    let m = (n + 1) as f64;
    Ok(8.0 * 2f64.sqrt() * sigma * sigma * m.sqrt() * (2.0 + (8.0 * m / delta).ln()))
}

/// `c sigma r` for uniform-fit kinds, `c sigma^2 r^2` for least-squares kinds.
pub fn statistical_accuracy(kind: EstimatorKind, sigma: f64, r: f64, c: f64) -> f64 {
    if kind.is_uniform_fit() {
        c * sigma * r
    } else {
        c * sigma * sigma * r * r
    }
}

/// `(T*, T_fast) = (||F_2n[y]||_inf / sigma, r ||F_2n[y]||_inf / Res_2)`.
pub fn predicted_iterations(op: &ConvolutionOperator, sigma: f64, r: f64, res2: f64) -> (f64, f64) {
    let peak = op.spectral_peak();
    let t_fast = if res2 > 0.0 { r * peak / res2 } else { f64::INFINITY };
    (peak / sigma, t_fast)
}

/// `r_bar = 2 dim(S)`.
pub fn r_bar_for_subspace(dim: usize) -> f64 {
    2.0 * dim as f64
}

pub fn solve(y: &ComplexSignal, config: &EstimatorConfig) -> Result<EstimatorSolution> {
    solve_observed(y, config, None)
}

/// As [`solve`], reporting every iteration to `observer`.
pub fn solve_observed(
    y: &ComplexSignal,
    config: &EstimatorConfig,
    observer: Option<&mut Observer<'_>>,
) -> Result<EstimatorSolution> {
    let op = ConvolutionOperator::build(y)?;
    solve_with_operator(&op, config, observer)
}

pub fn solve_with_operator(
    op: &ConvolutionOperator,
    config: &EstimatorConfig,
    observer: Option<&mut Observer<'_>>,
) -> Result<EstimatorSolution> {
    let kind = config.kind;
    let n = op.n();
    let sqrt_m = ((n + 1) as f64).sqrt();
    let radius = if kind.is_constrained() {
        Some(config.r_bar_checked(kind.name())? / sqrt_m)
    } else {
        None
    };
    let lambda = config.resolve_lambda(n)?;
    if let Some(s) = config.sigma {
        check_sigma(s).map_err(|e| Error::Config(e.to_string()))?;
    }
    let (rule, epsilon) = config.stopping_rule()?;
    let setup_u = config.setup_u.build(n + 1)?;
    let b = op.b();

    let trivial = radius == Some(0.0) || b.as_slice().iter().all(|x| *x == 0.0);
    let trace = if trivial {
        // u = 0 is optimal: the ball is a point, or b = 0 makes every
        // objective nonnegative with value 0 at the origin.
        let z = SpectralVector::zeros(n + 1);
        SolveTrace {
            records: Vec::new(),
            solution: z.clone(),
            dual_solution: None,
            last_iterate: z,
            stop_reason: crate::solvers::StopReason::Budget,
            iterations: 0,
            backtracks: 0,
            final_stepsize: 0.0,
        }
    } else if kind.uses_fgm() {
        let smooth = LeastSquares::new(op);
        let (term, sol_radius) = match (radius, lambda) {
            (Some(r), _) => (ProxTerm::L1Ball { radius: r }, None),
            // phi(u*) <= phi(0) = |b|^2 / 2 bounds lambda ||u*||_1.
            (None, Some(l)) => (ProxTerm::L1Penalty { weight: l, power: 1 }, Some(0.5 * b.norm2().powi(2) / l)),
            (None, None) => return Err(Error::Internal("penalized kind without lambda".into())),
        };
        let mut problem = CompositeProblem::new(&smooth, setup_u, term)?;
        if let Some(r) = sol_radius {
            problem = problem.with_solution_radius(r);
        }
        let eta = config.stepsize.unwrap_or_else(|| problem.default_stepsize());
        fgm_run_observed(&problem, eta, config.max_iter, &rule, observer)?
    } else {
        let dual = kind.dual_ball().expect("mirror-prox kinds have a dual ball");
        if dual == DualBall::L2 && config.setup_v != SetupChoice::L2 {
            return Err(Error::Config(format!("{kind} needs the l2 setup for the dual variable")));
        }
        let setup_v = config.setup_v.build(n + 1)?;
        let geometry = SaddleGeometry::new(radius, lambda.unwrap_or(0.0), dual)?;
        // Bound on ||u*||_1 from phi_bar(u*) <= phi_bar(0) = ||b||_{C,p}.
        let sol_radius = lambda.map(|l| dual.support(b) / l);
        let problem = SaddleProblem::new(op, geometry, setup_u, setup_v, sol_radius)?;
        let eta = config.stepsize.unwrap_or_else(|| problem.default_stepsize());
        if config.adaptive {
            cmp_run_adaptive_from(&problem, eta, config.max_iter, &rule, config.averaging, observer)?
        } else {
            cmp_run_observed(&problem, eta, config.max_iter, &rule, config.averaging, observer)?
        }
    };

    let u = trace.solution.clone();
    Ok(EstimatorSolution {
        kind,
        filter_time: filter_from_spectral(&u)?,
        denoised: denoise_spectral(op, &u)?,
        r_realized: sqrt_m * u.complex_l1(),
        filter_spectral: u,
        trace,
        lambda,
        radius,
        epsilon,
        stopping_rule: rule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{convolve_oracle, C64};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lambda_formulas() {
        let uf = default_lambda_uf(0.1, 99, 0.05).unwrap();
        assert!((uf - 46.93).abs() < 0.01, "{uf}");
        let ls = default_lambda_ls(0.1, 99, 0.05).unwrap();
        assert!((ls - 13.22).abs() < 0.01, "{ls}");
        assert!((default_lambda_uf(0.2, 99, 0.05).unwrap() - 2.0 * uf).abs() < 1e-12);
        assert!((default_lambda_ls(0.2, 99, 0.05).unwrap() - 4.0 * ls).abs() < 1e-12);
        assert!(default_lambda_uf(0.1, 10, 1.0).is_err());
        assert!(default_lambda_ls(0.1, 10, 0.0).is_err());
        assert!(default_lambda_ls(0.0, 10, 0.5).is_err());
    }

    #[test]
    fn statistical_accuracy_examples() {
        assert!((statistical_accuracy(EstimatorKind::ConUf, 0.1, 8.0, 1.0) - 0.8).abs() < 1e-12);
        assert!((statistical_accuracy(EstimatorKind::ConLs, 0.1, 8.0, 1.0) - 0.64).abs() < 1e-12);
        let a = statistical_accuracy(EstimatorKind::PenLs, 0.1, 3.0, 1.0);
        let b = statistical_accuracy(EstimatorKind::PenLs, 0.2, 3.0, 1.0);
        assert!((b - 4.0 * a).abs() < 1e-15);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in EstimatorKind::ALL {
            assert_eq!(k.name().parse::<EstimatorKind>().unwrap(), k);
        }
        assert!("con-xx".parse::<EstimatorKind>().is_err());
        assert_eq!(r_bar_for_subspace(4), 8.0);
    }

    #[test]
    fn zero_observations_give_zero_filter() {
        let y = ComplexSignal::zeros(-4, 9).unwrap();
        for kind in EstimatorKind::ALL {
            let cfg = EstimatorConfig::new(kind)
                .with_r_bar(2.0)
                .with_lambda(Lambda::Value(1.0))
                .with_max_iter(20);
            let sol = solve(&y, &cfg).unwrap();
            assert!(sol.filter_spectral.norm2() <= 1e-10, "{kind}");
        }
    }

    #[test]
    fn config_errors() {
        let y = ComplexSignal::two_sided(vec![c(1.0, 0.0); 5]).unwrap();
        assert!(matches!(solve(&y, &EstimatorConfig::new(EstimatorKind::ConUf)), Err(Error::Config(_))));
        assert!(matches!(solve(&y, &EstimatorConfig::new(EstimatorKind::PenLs)), Err(Error::Config(_))));
        let auto = EstimatorConfig::new(EstimatorKind::PenUf).with_lambda(Lambda::Auto);
        assert!(matches!(solve(&y, &auto), Err(Error::Config(_))));
        let star = EstimatorConfig::new(EstimatorKind::PenLsStar)
            .with_lambda(Lambda::Auto)
            .with_sigma(0.1);
        assert!(matches!(solve(&y, &star), Err(Error::Config(_))));
        let l1_dual = EstimatorConfig::new(EstimatorKind::ConLsStar)
            .with_r_bar(1.0)
            .with_setups(SetupChoice::L2, SetupChoice::L1);
        assert!(matches!(solve(&y, &l1_dual), Err(Error::Config(_))));
        let stat = EstimatorConfig::new(EstimatorKind::ConLs)
            .with_r_bar(1.0)
            .with_stopping(Stopping::Statistical { factor: 1.0 });
        assert!(matches!(solve(&y, &stat), Err(Error::Config(_))));
    }

    #[test]
    fn degenerate_half_width_runs() {
        let y = ComplexSignal::two_sided(vec![c(0.7, -0.3)]).unwrap();
        for kind in EstimatorKind::ALL {
            let cfg = EstimatorConfig::new(kind)
                .with_r_bar(1.0)
                .with_lambda(Lambda::Value(0.1))
                .with_max_iter(50);
            let sol = solve(&y, &cfg).unwrap();
            assert_eq!(sol.filter_time.len(), 1);
            assert!(sol.trace.iterations > 0);
        }
    }

    #[test]
    fn denoised_matches_direct_convolution() {
        let n = 6;
        let y = ComplexSignal::from_fn(-(n as i64), 2 * n + 1, |t| c((0.4 * t as f64).cos(), 0.1 * t as f64)).unwrap();
        let cfg = EstimatorConfig::new(EstimatorKind::ConLs).with_r_bar(2.0).with_max_iter(30);
        let sol = solve(&y, &cfg).unwrap();
        let direct = convolve_oracle(&sol.filter_time, &y, n).unwrap();
        for (a, b) in sol.denoised.values().iter().zip(&direct) {
            assert!((a - b).norm() < 1e-8);
        }
        assert!(sol.r_realized <= 2.0 + 1e-8);
    }

    #[test]
    fn residual_examples() {
        let n = 3;
        let y = ComplexSignal::from_fn(-(n as i64), 2 * n + 1, |t| c(t as f64, 1.0)).unwrap();
        let op = ConvolutionOperator::build(&y).unwrap();
        let zero = SpectralVector::zeros(n + 1);
        assert!((residual(&op, &zero, 2.0).unwrap() - op.b().norm2()).abs() < 1e-12);
        assert!((residual(&op, &zero, f64::INFINITY).unwrap() - op.b().complex_linf()).abs() < 1e-12);
        assert!(residual(&op, &zero, 1.0).is_err());
    }
}
