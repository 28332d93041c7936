//! File formats: signal CSV, results CSV and JSON outputs.

use std::io::{Read, Write};
use std::path::Path;

use convden::estimators::{EstimatorKind, EstimatorSolution, SetupChoice};
use convden::{ComplexSignal, C64};
use serde::{Deserialize, Serialize};

use crate::config::setup_name;
use crate::error::{BenchError, Result};
use crate::runner::{AggregatePoint, ExperimentResult, Summary};

pub const RESULTS_HEADER: [&str; 10] = [
    "scenario",
    "estimator",
    "setup",
    "trial",
    "iteration",
    "objective",
    "certificate",
    "rel_accuracy",
    "l2_loss",
    "linf_fourier_loss",
];

#[derive(Debug, Serialize, Deserialize)]
struct SignalRow {
    tau: i64,
    re: f64,
    im: f64,
}

pub fn write_signal<W: Write>(w: W, x: &ComplexSignal) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (i, v) in x.values().iter().enumerate() {
        out.serialize(SignalRow {
            tau: x.start() + i as i64,
            re: v.re,
            im: v.im,
        })?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a `tau,re,im` CSV. Rows may come in any order but must cover a
/// contiguous range of `tau` exactly once.
pub fn read_signal<R: Read>(r: R) -> Result<ComplexSignal> {
    let mut rows: Vec<SignalRow> = Vec::new();
    for (i, row) in csv::Reader::from_reader(r).deserialize().enumerate() {
        let row: SignalRow = row.map_err(|e| BenchError::Input(format!("signal row {}: {e}", i + 1)))?;
        if !row.re.is_finite() || !row.im.is_finite() {
            return Err(BenchError::Input(format!("signal row {}: non-finite value", i + 1)));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(BenchError::Input("signal file has no rows".into()));
    }
    rows.sort_by_key(|r| r.tau);
    for pair in rows.windows(2) {
        if pair[1].tau != pair[0].tau + 1 {
            return Err(BenchError::Input(format!(
                "signal taus must be contiguous and unique; found {} then {}",
                pair[0].tau, pair[1].tau
            )));
        }
    }
    let start = rows[0].tau;
    Ok(ComplexSignal::new(start, rows.into_iter().map(|r| C64::new(r.re, r.im)).collect())?)
}

pub fn read_signal_file(path: &Path) -> Result<ComplexSignal> {
    let f = std::fs::File::open(path).map_err(|e| BenchError::Input(format!("{}: {e}", path.display())))?;
    read_signal(f).map_err(|e| match e {
        BenchError::Input(m) => BenchError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_signal_file(path: &Path, x: &ComplexSignal) -> Result<()> {
    write_signal(std::fs::File::create(path)?, x)
}

fn row_fields(
    scenario: &str,
    estimator: EstimatorKind,
    setup: SetupChoice,
    trial: &str,
    p: &AggregatePoint,
) -> [String; 10] {
    [
        scenario.to_string(),
        estimator.to_string(),
        setup_name(setup).to_string(),
        trial.to_string(),
        p.iteration.to_string(),
        p.objective.to_string(),
        p.certificate.map(|c| c.to_string()).unwrap_or_default(),
        p.rel_accuracy.to_string(),
        p.l2_loss.to_string(),
        p.linf_fourier_loss.to_string(),
    ]
}

/// Per-iteration rows of every trial, ordered by trial then cell.
pub fn write_trials_csv<W: Write>(w: W, result: &ExperimentResult) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RESULTS_HEADER)?;
    for t in &result.trials {
        let trial = t.trial.to_string();
        for c in &t.curve {
            let p = AggregatePoint {
                iteration: c.iteration,
                objective: c.objective,
                certificate: c.certificate,
                rel_accuracy: c.rel_accuracy,
                l2_loss: c.l2_loss,
                linf_fourier_loss: c.linf_fourier_loss,
            };
            out.write_record(row_fields(&t.scenario, t.estimator, t.setup, &trial, &p))?;
        }
    }
    out.flush()?;
    Ok(())
}

/// The `agg95` and `median` curves of every cell.
pub fn write_aggregate_csv<W: Write>(w: W, scenario: &str, result: &ExperimentResult) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RESULTS_HEADER)?;
    for a in &result.aggregates {
        for (label, curve) in [("agg95", &a.p95), ("median", &a.median)] {
            for p in curve {
                out.write_record(row_fields(scenario, a.estimator, a.setup, label, p))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_summary_json<W: Write>(w: W, summaries: &[Summary]) -> Result<()> {
    serde_json::to_writer_pretty(w, summaries)?;
    Ok(())
}

/// Paths written by [`write_experiment`].
#[derive(Clone, Debug)]
pub struct OutputPaths {
    pub trials: std::path::PathBuf,
    pub aggregate: std::path::PathBuf,
    pub summary: std::path::PathBuf,
}

pub fn write_experiment(dir: &Path, name: &str, scenario: &str, result: &ExperimentResult) -> Result<OutputPaths> {
    std::fs::create_dir_all(dir)?;
    let paths = OutputPaths {
        trials: dir.join(format!("{name}_trials.csv")),
        aggregate: dir.join(format!("{name}_aggregate.csv")),
        summary: dir.join(format!("{name}_summary.json")),
    };
    write_trials_csv(std::io::BufWriter::new(std::fs::File::create(&paths.trials)?), result)?;
    write_aggregate_csv(std::io::BufWriter::new(std::fs::File::create(&paths.aggregate)?), scenario, result)?;
    write_summary_json(std::io::BufWriter::new(std::fs::File::create(&paths.summary)?), &result.summaries)?;
    Ok(paths)
}

/// A solved estimator in a self-contained form that `certify` can check
/// without re-running the solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub estimator: EstimatorKind,
    pub setup_u: SetupChoice,
    pub setup_v: SetupChoice,
    /// Observation on `[-n, n]` as `[re, im]` pairs.
    pub observation: Vec<[f64; 2]>,
    pub radius: Option<f64>,
    pub lambda: Option<f64>,
    /// Real coordinates of the spectral filter.
    pub filter_spectral: Vec<f64>,
    /// Real coordinates of the averaged dual point (mirror prox only).
    pub dual: Option<Vec<f64>>,
    pub iterations: usize,
    pub objective: Option<f64>,
    /// Claimed online accuracy bound at the returned point.
    pub certificate: Option<f64>,
}

impl SolutionFile {
    pub fn new(y: &ComplexSignal, sol: &EstimatorSolution, setup_u: SetupChoice, setup_v: SetupChoice) -> Self {
        let last = sol.trace.last();
        Self {
            estimator: sol.kind,
            setup_u,
            setup_v,
            observation: y.values().iter().map(|v| [v.re, v.im]).collect(),
            radius: sol.radius,
            lambda: sol.lambda,
            filter_spectral: sol.filter_spectral.as_slice().to_vec(),
            dual: sol.trace.dual_solution.as_ref().map(|v| v.as_slice().to_vec()),
            iterations: sol.trace.iterations,
            objective: last.map(|r| r.objective),
            certificate: last.and_then(|r| r.certificate),
        }
    }

    pub fn observation_signal(&self) -> Result<ComplexSignal> {
        Ok(ComplexSignal::two_sided(
            self.observation.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        )?)
    }
}
