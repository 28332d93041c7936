//! Multi-trial experiment runner.

use std::time::Instant;

use convden::estimators::{
    denoise_spectral, solve_with_operator, statistical_accuracy, EstimatorConfig, EstimatorKind, SetupChoice, Stopping,
};
use convden::operator::ConvolutionOperator;
use convden::solvers::{Averaging, IterationRecord, StopReason};
use convden::{ComplexSignal, SpectralVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{setup_name, ExperimentConfig};
use crate::error::{BenchError, Result};
use crate::metrics::{metrics_from_estimate, Metrics};
use crate::scenario::{add_noise, trial_rng};

/// One recorded iteration of one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub iteration: usize,
    pub objective: f64,
    pub certificate: Option<f64>,
    pub rel_accuracy: f64,
    pub l2_loss: f64,
    pub linf_fourier_loss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub scenario: String,
    pub estimator: EstimatorKind,
    pub setup: SetupChoice,
    pub trial: usize,
    pub curve: Vec<CurvePoint>,
    pub stop_iteration: usize,
    pub stop_reason: StopReason,
    /// Solver wall time, without generation, metrics or I/O.
    pub solver_seconds: f64,
    pub final_metrics: Metrics,
    /// Objective of the reference solve, when one was run.
    pub reference_objective: Option<f64>,
    /// Statistical accuracy of this estimator for the trial's noise level.
    pub statistical_accuracy: f64,
    /// First iteration whose online bound is at most `statistical_accuracy`.
    pub crossing_iteration: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialFailure {
    pub estimator: EstimatorKind,
    pub setup: SetupChoice,
    pub trial: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregatePoint {
    pub iteration: usize,
    pub objective: f64,
    pub certificate: Option<f64>,
    pub rel_accuracy: f64,
    pub l2_loss: f64,
    pub linf_fourier_loss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub estimator: EstimatorKind,
    pub setup: SetupChoice,
    pub p95: Vec<AggregatePoint>,
    pub median: Vec<AggregatePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub estimator: EstimatorKind,
    pub setup: &'static str,
    pub n: usize,
    pub snr: f64,
    pub sigma: f64,
    pub trials: usize,
    pub failed_trials: usize,
    pub mean_l2_loss: f64,
    pub p95_l2_loss: f64,
    pub median_l2_loss: f64,
    pub mean_stop_iter: f64,
    pub mean_solver_seconds: f64,
    pub median_solver_seconds: f64,
    pub median_crossing_iter: Option<f64>,
    pub percentile_method: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub trials: Vec<TrialResult>,
    pub failures: Vec<TrialFailure>,
    pub aggregates: Vec<Aggregate>,
    pub summaries: Vec<Summary>,
}

pub const PERCENTILE_METHOD: &str = "linear interpolation between order statistics";

/// Empirical `q`-quantile with linear interpolation; NaN for no data.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi || v[lo] == v[hi] {
        return v[lo];
    }
    let frac = pos - lo as f64;
    v[lo] + (v[hi] - v[lo]) * frac
}

pub fn median(values: &[f64]) -> f64 {
    percentile(values, 0.5)
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// `(objective - reference) / reference`, or without a reference the
/// certificate-based bound `cert / (objective - cert)`.
fn relative_accuracy(objective: f64, certificate: Option<f64>, reference: Option<f64>) -> f64 {
    match (reference, certificate) {
        (Some(r), _) if r > 0.0 => ((objective - r) / r).max(0.0),
        (Some(_), _) => {
            if objective <= 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
        (None, Some(c)) => {
            let lower = objective - c;
            if lower > 0.0 {
                c / lower
            } else {
                f64::INFINITY
            }
        }
        (None, None) => f64::NAN,
    }
}

/// Smallest objective seen by a long budget run (adaptive for mirror-prox
/// kinds). The optimal value does not depend on the proximal setup, so the
/// cheaper `l2` setups are used.
pub fn reference_objective(op: &ConvolutionOperator, cfg: &EstimatorConfig, iterations: usize) -> Result<f64> {
    let mut rc = cfg
        .clone()
        .with_stopping(Stopping::Budget)
        .with_max_iter(iterations)
        .with_setups(SetupChoice::L2, SetupChoice::L2);
    rc.adaptive = !cfg.kind.uses_fgm();
    rc.stepsize = None;
    rc.averaging = Averaging::Uniform;
    let sol = solve_with_operator(op, &rc, None)?;
    if sol.trace.records.is_empty() {
        // trivial problem: zero is optimal
        return Ok(0.0);
    }
    Ok(sol.trace.records.iter().map(|r| r.objective).fold(f64::INFINITY, f64::min))
}

/// Solves one (estimator, setup) cell on the observation behind `op` of
/// clean signal `x`, recording the curve every `record_every` iterations.
/// `reference` is the optimal-value proxy behind `rel_accuracy`.
#[allow(clippy::too_many_arguments)]
pub fn run_trial(
    scenario: &str,
    x: &ComplexSignal,
    op: &ConvolutionOperator,
    cfg: &EstimatorConfig,
    setup: SetupChoice,
    trial: usize,
    reference: Option<f64>,
    record_every: usize,
) -> Result<TrialResult> {
    let n = op.n();
    let stat_eps = match (cfg.sigma, cfg.r_bar) {
        (Some(s), Some(r)) => statistical_accuracy(cfg.kind, s, r, cfg.accuracy_constant),
        _ => f64::NAN,
    };
    let record_every = record_every.max(1);
    let mut curve = Vec::new();
    let mut crossing = None;
    let mut observer_seconds = 0.0;
    let mut err: Option<BenchError> = None;
    let point = |rec: &IterationRecord, m: Metrics| CurvePoint {
        iteration: rec.iteration,
        objective: rec.objective,
        certificate: rec.certificate,
        rel_accuracy: relative_accuracy(rec.objective, rec.certificate, reference),
        l2_loss: m.l2_loss,
        linf_fourier_loss: m.linf_fourier_loss,
    };
    let (sol, total) = {
        let mut obs = |rec: &IterationRecord, u: &SpectralVector, _: Option<&SpectralVector>| {
            let t0 = Instant::now();
            let bound = rec.certificate.unwrap_or(rec.apriori);
            if crossing.is_none() && bound <= stat_eps {
                crossing = Some(rec.iteration);
            }
            // the final iteration is recorded below from the returned solution
            if rec.iteration % record_every == 0 && err.is_none() {
                match denoise_spectral(op, u)
                    .map_err(BenchError::from)
                    .and_then(|d| metrics_from_estimate(x, d.values(), n))
                {
                    Ok(m) => curve.push(point(rec, m)),
                    Err(e) => err = Some(e),
                }
            }
            observer_seconds += t0.elapsed().as_secs_f64();
        };
        let start = Instant::now();
        let sol = solve_with_operator(op, cfg, Some(&mut obs))?;
        (sol, start.elapsed().as_secs_f64())
    };
    if let Some(e) = err {
        return Err(e);
    }
    let final_metrics = metrics_from_estimate(x, sol.denoised.values(), n)?;
    if let Some(rec) = sol.trace.last() {
        if curve.last().map(|c: &CurvePoint| c.iteration) != Some(rec.iteration) {
            curve.push(point(rec, final_metrics));
        }
    }
    Ok(TrialResult {
        scenario: scenario.to_string(),
        estimator: cfg.kind,
        setup,
        trial,
        curve,
        stop_iteration: sol.trace.iterations,
        stop_reason: sol.trace.stop_reason,
        solver_seconds: (total - observer_seconds).max(0.0),
        final_metrics,
        reference_objective: reference,
        statistical_accuracy: stat_eps,
        crossing_iteration: crossing,
    })
}

/// Pointwise 95th percentile and median over trials. A trial that stopped
/// early keeps contributing its last recorded values.
pub fn aggregate(trials: &[&TrialResult]) -> (Vec<AggregatePoint>, Vec<AggregatePoint>) {
    let mut grid: Vec<usize> = trials.iter().flat_map(|t| t.curve.iter().map(|p| p.iteration)).collect();
    grid.sort_unstable();
    grid.dedup();
    let mut cursors = vec![0usize; trials.len()];
    let (mut p95, mut med) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
    for &it in &grid {
        let mut cols: [Vec<f64>; 5] = Default::default();
        for (t, cur) in trials.iter().zip(cursors.iter_mut()) {
            while *cur + 1 < t.curve.len() && t.curve[*cur + 1].iteration <= it {
                *cur += 1;
            }
            let Some(p) = t.curve.get(*cur) else { continue };
            if p.iteration > it {
                continue;
            }
            cols[0].push(p.objective);
            if let Some(c) = p.certificate {
                cols[1].push(c);
            }
            cols[2].push(p.rel_accuracy);
            cols[3].push(p.l2_loss);
            cols[4].push(p.linf_fourier_loss);
        }
        for (out, q) in [(&mut p95, 0.95), (&mut med, 0.5)] {
            out.push(AggregatePoint {
                iteration: it,
                objective: percentile(&cols[0], q),
                certificate: (!cols[1].is_empty()).then(|| percentile(&cols[1], q)),
                rel_accuracy: percentile(&cols[2], q),
                l2_loss: percentile(&cols[3], q),
                linf_fourier_loss: percentile(&cols[4], q),
            });
        }
    }
    (p95, med)
}

/// Runs every trial of `cfg`. Trials run in parallel; results are ordered by
/// (trial, estimator, setup) regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let kind = cfg.scenario_kind()?;
    let scenario = kind.to_string();
    let n = cfg.scenario.n;
    let sigma = cfg.sigma()?;
    let cells: Vec<(EstimatorKind, SetupChoice, EstimatorConfig)> = cfg
        .solver
        .estimators
        .iter()
        .flat_map(|&k| cfg.solver.setups.iter().map(move |&s| (k, s)))
        .map(|(k, s)| cfg.estimator_config(k, s).map(|c| (k, s, c)))
        .collect::<Result<_>>()?;

    let one_trial = |trial: usize| -> Vec<std::result::Result<TrialResult, TrialFailure>> {
        let fail_all = |msg: String| {
            cells
                .iter()
                .map(|&(k, s, _)| {
                    Err(TrialFailure {
                        estimator: k,
                        setup: s,
                        trial,
                        message: msg.clone(),
                    })
                })
                .collect()
        };
        let mut rng = trial_rng(cfg.seed, trial);
        let prepared = kind
            .generate(n, &mut rng)
            .and_then(|x| add_noise(&x, sigma, &mut rng).map(|y| (x, y)))
            .and_then(|(x, y)| Ok((x, ConvolutionOperator::build(&y)?)));
        let (x, op) = match prepared {
            Ok(v) => v,
            Err(e) => return fail_all(e.to_string()),
        };
        let mut references: Vec<(EstimatorKind, std::result::Result<Option<f64>, String>)> = Vec::new();
        cells
            .iter()
            .map(|(k, s, ec)| {
                let fail = |message: String| TrialFailure {
                    estimator: *k,
                    setup: *s,
                    trial,
                    message,
                };
                let iters = cfg.solver.reference_iterations;
                let reference = match references.iter().find(|(rk, _)| rk == k) {
                    Some((_, r)) => r.clone(),
                    None => {
                        let r = if iters > 0 {
                            reference_objective(&op, ec, iters).map(Some).map_err(|e| e.to_string())
                        } else {
                            Ok(None)
                        };
                        references.push((*k, r.clone()));
                        r
                    }
                };
                let reference = reference.map_err(|m| fail(format!("reference solve: {m}")))?;
                run_trial(&scenario, &x, &op, ec, *s, trial, reference, cfg.solver.record_every)
                    .map_err(|e| fail(e.to_string()))
            })
            .collect()
    };

    let run = || -> Vec<_> { (0..cfg.trials).into_par_iter().flat_map_iter(one_trial).collect() };
    let outcomes = if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| BenchError::Config(format!("threads: {e}")))?
            .install(run)
    } else {
        run()
    };

    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(t) => trials.push(t),
            Err(f) => failures.push(f),
        }
    }

    let mut aggregates = Vec::new();
    let mut summaries = Vec::new();
    for &(k, s, _) in &cells {
        let mine: Vec<&TrialResult> = trials.iter().filter(|t| t.estimator == k && t.setup == s).collect();
        let (p95, med) = aggregate(&mine);
        aggregates.push(Aggregate {
            estimator: k,
            setup: s,
            p95,
            median: med,
        });
        let l2: Vec<f64> = mine.iter().map(|t| t.final_metrics.l2_loss).collect();
        let secs: Vec<f64> = mine.iter().map(|t| t.solver_seconds).collect();
        let stops: Vec<f64> = mine.iter().map(|t| t.stop_iteration as f64).collect();
        let crossings: Vec<f64> = mine.iter().filter_map(|t| t.crossing_iteration.map(|c| c as f64)).collect();
        summaries.push(Summary {
            scenario: scenario.clone(),
            estimator: k,
            setup: setup_name(s),
            n,
            snr: cfg.scenario.snr,
            sigma,
            trials: mine.len(),
            failed_trials: failures.iter().filter(|f| f.estimator == k && f.setup == s).count(),
            mean_l2_loss: mean(&l2),
            p95_l2_loss: percentile(&l2, 0.95),
            median_l2_loss: median(&l2),
            mean_stop_iter: mean(&stops),
            mean_solver_seconds: mean(&secs),
            median_solver_seconds: median(&secs),
            median_crossing_iter: (!crossings.is_empty()).then(|| median(&crossings)),
            percentile_method: PERCENTILE_METHOD,
        });
    }
    Ok(ExperimentResult {
        trials,
        failures,
        aggregates,
        summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_interpolates() {
        let v = [3.0, 1.0, 2.0, 4.0, 5.0];
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 1.0), 5.0);
        assert!((percentile(&v, 0.95) - 4.8).abs() < 1e-12);
        assert!(percentile(&[], 0.5).is_nan());
        assert_eq!(percentile(&[f64::INFINITY, 1.0], 0.95), f64::INFINITY);
    }

    #[test]
    fn relative_accuracy_cases() {
        assert_eq!(relative_accuracy(3.0, None, Some(2.0)), 0.5);
        assert_eq!(relative_accuracy(3.0, Some(1.0), None), 0.5);
        assert_eq!(relative_accuracy(1.0, Some(2.0), None), f64::INFINITY);
    }

    fn point(iteration: usize, v: f64) -> CurvePoint {
        CurvePoint {
            iteration,
            objective: v,
            certificate: Some(v),
            rel_accuracy: v,
            l2_loss: v,
            linf_fourier_loss: v,
        }
    }

    #[test]
    fn aggregate_carries_forward() {
        let mk = |trial, curve| TrialResult {
            scenario: "s".into(),
            estimator: EstimatorKind::ConUf,
            setup: SetupChoice::L2,
            trial,
            curve,
            stop_iteration: 0,
            stop_reason: StopReason::Budget,
            solver_seconds: 0.0,
            final_metrics: Metrics {
                l2_loss: 0.0,
                linf_fourier_loss: 0.0,
            },
            reference_objective: None,
            statistical_accuracy: 0.0,
            crossing_iteration: None,
        };
        let a = mk(0, vec![point(1, 4.0), point(2, 2.0)]);
        let b = mk(1, vec![point(1, 6.0), point(2, 3.0), point(3, 1.0)]);
        let (p95, med) = aggregate(&[&a, &b]);
        assert_eq!(p95.len(), 3);
        // at iteration 3 trial a contributes its last value 2.0
        assert_eq!(med[2].objective, 1.5);
        for (hi, lo) in p95.iter().zip(&med) {
            assert!(hi.objective >= lo.objective);
        }
    }
}
