//! Independent re-check of a saved solution's accuracy claim.

use convden::certificate::{DualBall, SaddleGeometry};
use convden::estimators::{dual_value, primal_value};
use convden::operator::ConvolutionOperator;
use convden::prox::ProxTerm;
use convden::solvers::{CompositeProblem, LeastSquares};
use convden::SpectralVector;
use serde::Serialize;

use crate::error::{BenchError, Result};
use crate::io::SolutionFile;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifyReport {
    pub estimator: String,
    pub claimed: Option<f64>,
    /// Exact duality gap (mirror prox) or linearization gap (FGM).
    pub recomputed: f64,
    pub primal_feasible: bool,
    pub dual_feasible: bool,
    pub valid: bool,
}

/// Relative slack for floating-point noise in the comparisons.
const SLACK: f64 = 1e-9;

pub fn certify(file: &SolutionFile) -> Result<CertifyReport> {
    let kind = file.estimator;
    let y = file.observation_signal()?;
    let op = ConvolutionOperator::build(&y)?;
    let n = op.n();
    let u = SpectralVector::from_real(file.filter_spectral.clone())?;
    if u.complex_len() != n + 1 {
        return Err(BenchError::Input(format!(
            "filter has {} coefficients, observation needs {}",
            u.complex_len(),
            n + 1
        )));
    }
    let scale = 1.0 + file.objective.map(f64::abs).unwrap_or(0.0) + op.b().norm2();
    let primal_feasible = match file.radius {
        Some(r) => u.complex_l1() <= r * (1.0 + SLACK) + SLACK,
        None => true,
    };
    if kind.is_constrained() != file.radius.is_some() {
        return Err(BenchError::Input(format!("{kind}: radius does not match the estimator kind")));
    }

    let (recomputed, dual_feasible) = if kind.uses_fgm() {
        let smooth = LeastSquares::new(&op);
        let term = match (file.radius, file.lambda) {
            (Some(r), _) => ProxTerm::L1Ball { radius: r },
            (None, Some(l)) => ProxTerm::L1Penalty { weight: l, power: 1 },
            (None, None) => return Err(BenchError::Input(format!("{kind}: missing lambda"))),
        };
        let problem = CompositeProblem::new(&smooth, file.setup_u.build(n + 1)?, term)?;
        (problem.linearization_gap(&u), true)
    } else {
        let dual = kind.dual_ball().expect("mirror-prox kinds have a dual ball");
        let v = file
            .dual
            .as_ref()
            .ok_or_else(|| BenchError::Input(format!("{kind}: the dual point is missing")))?;
        let v = SpectralVector::from_real(v.clone())?;
        if v.dim() != u.dim() {
            return Err(BenchError::Input("dual point has the wrong length".into()));
        }
        let geometry = SaddleGeometry::new(file.radius, file.lambda.unwrap_or(0.0), dual)?;
        let dual_norm = match dual {
            DualBall::L1 => v.complex_l1(),
            DualBall::L2 => v.norm2(),
        };
        let gap = primal_value(&op, &geometry, &u) - dual_value(&op, &geometry, &v);
        (gap, dual_norm <= 1.0 + SLACK)
    };
    let claim_ok = match file.certificate {
        Some(c) => recomputed <= c + SLACK * scale,
        None => true,
    };
    Ok(CertifyReport {
        estimator: kind.to_string(),
        claimed: file.certificate,
        recomputed,
        primal_feasible,
        dual_feasible,
        valid: claim_ok && primal_feasible && dual_feasible,
    })
}
