//! Experiment configuration: a TOML file plus `--key=value` overrides.
//!
//! ```toml
//! name = "cohsin8"
//! seed = 7
//! trials = 20
//!
//! [scenario]
//! kind = "cohsin"      # ransin | cohsin | modsin
//! s = 8
//! n = 100
//! snr = 16.0
//!
//! [solver]
//! estimators = ["con-uf"]
//! setups = ["l1", "l2"]
//! max_iter = 1000
//! stopping = "budget"  # budget | accuracy | statistical
//!
//! [output]
//! dir = "results"
//! ```
//!
//! Overrides use dotted paths, e.g. `--scenario.snr=8` or
//! `--solver.estimators=["con-ls"]`. Values are parsed as TOML and fall back
//! to plain strings.

use std::path::PathBuf;

use convden::estimators::{EstimatorConfig, EstimatorKind, Lambda, SetupChoice, Stopping};
use convden::solvers::Averaging;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, BenchError, Result};
use crate::scenario::{sigma_for_snr, ScenarioKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Worker threads; 0 lets the pool decide.
    #[serde(default)]
    pub threads: usize,
    pub scenario: ScenarioConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: String,
    pub s: usize,
    #[serde(default)]
    pub m: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    pub snr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoppingKind {
    Budget,
    Accuracy,
    Statistical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AveragingKind {
    Uniform,
    Suffix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Value(f64),
    Word(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub estimators: Vec<EstimatorKind>,
    #[serde(default = "default_setups")]
    pub setups: Vec<SetupChoice>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_stopping")]
    pub stopping: StoppingKind,
    /// Absolute accuracy for `stopping = "accuracy"`.
    pub accuracy: Option<f64>,
    /// Multiple of the statistical accuracy for `stopping = "statistical"`.
    #[serde(default = "one")]
    pub factor: f64,
    #[serde(default = "one")]
    pub accuracy_constant: f64,
    /// Defaults to `2 dim(S)` of the scenario.
    pub r_bar: Option<f64>,
    /// A number or `"auto"`; penalized kinds default to `"auto"`.
    pub lambda: Option<LambdaSpec>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub adaptive: bool,
    #[serde(default = "default_averaging")]
    pub averaging: AveragingKind,
    #[serde(default = "default_suffix")]
    pub suffix_fraction: f64,
    pub stepsize: Option<f64>,
    /// Iterations of the per-trial reference solve behind `rel_accuracy`;
    /// 0 uses the certificate-based bound instead.
    #[serde(default)]
    pub reference_iterations: usize,
    /// Keep every `record_every`-th iteration (the last one is always kept).
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for `<name>_trials.csv`, `<name>_aggregate.csv` and
    /// `<name>_summary.json`; nothing is written when absent.
    pub dir: Option<PathBuf>,
}

fn default_name() -> String {
    "experiment".into()
}
fn default_trials() -> usize {
    1
}
fn default_n() -> usize {
    100
}
fn default_setups() -> Vec<SetupChoice> {
    vec![SetupChoice::L2]
}
fn default_max_iter() -> usize {
    1000
}
fn default_stopping() -> StoppingKind {
    StoppingKind::Budget
}
fn one() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    0.05
}
fn default_averaging() -> AveragingKind {
    AveragingKind::Uniform
}
fn default_suffix() -> f64 {
    0.5
}
fn default_record_every() -> usize {
    1
}

pub fn setup_name(s: SetupChoice) -> &'static str {
    match s {
        SetupChoice::L1 => "l1",
        SetupChoice::L2 => "l2",
    }
}

/// Sets `key` (a dotted path) in `table`.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let body = spec.trim_start_matches('-');
    let Some((key, raw)) = body.split_once('=') else {
        return config_err(format!("override '{spec}' is not of the form --key=value"));
    };
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return config_err(format!("override key '{key}' has an empty segment"));
    }
    let mut cur = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = match entry {
            toml::Value::Table(t) => t,
            _ => return config_err(format!("override key '{key}': '{part}' is not a table")),
        };
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| BenchError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, overrides).map_err(|e| match e {
            BenchError::Config(msg) => BenchError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn scenario_kind(&self) -> Result<ScenarioKind> {
        let sc = &self.scenario;
        match sc.kind.as_str() {
            "ransin" => Ok(ScenarioKind::RanSin { s: sc.s }),
            "cohsin" => Ok(ScenarioKind::CohSin { s: sc.s }),
            "modsin" => Ok(ScenarioKind::ModSin { s: sc.s, m: sc.m }),
            other => config_err(format!("scenario.kind: unknown '{other}', expected ransin, cohsin or modsin")),
        }
    }

    pub fn sigma(&self) -> Result<f64> {
        sigma_for_snr(self.scenario.snr, self.scenario.n)
    }

    pub fn scenario_id(&self) -> Result<String> {
        Ok(self.scenario_kind()?.to_string())
    }

    pub fn r_bar(&self) -> Result<f64> {
        Ok(self
            .solver
            .r_bar
            .unwrap_or_else(|| convden::estimators::r_bar_for_subspace(self.scenario_kind().map(|k| k.subspace_dim()).unwrap_or(0))))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return config_err("trials: must be at least 1");
        }
        if self.scenario.s == 0 {
            return config_err("scenario.s: must be at least 1");
        }
        if self.scenario.n == 0 {
            return config_err("scenario.n: must be at least 1");
        }
        self.scenario_kind()?;
        self.sigma().map_err(|e| BenchError::Config(format!("scenario.snr: {e}")))?;
        let sv = &self.solver;
        if sv.estimators.is_empty() {
            return config_err("solver.estimators: list at least one estimator");
        }
        if sv.setups.is_empty() {
            return config_err("solver.setups: list at least one setup");
        }
        if sv.record_every == 0 {
            return config_err("solver.record_every: must be at least 1");
        }
        if sv.stopping == StoppingKind::Accuracy && !matches!(sv.accuracy, Some(a) if a > 0.0) {
            return config_err("solver.accuracy: a positive value is required with stopping = \"accuracy\"");
        }
        if let Some(LambdaSpec::Word(w)) = &sv.lambda {
            if w != "auto" {
                return config_err(format!("solver.lambda: expected a number or \"auto\", got '{w}'"));
            }
        }
        for &kind in &sv.estimators {
            for &setup in &sv.setups {
                self.estimator_config(kind, setup)
                    .and_then(|c| c.resolve_lambda(self.scenario.n).map_err(BenchError::from))
                    .map_err(|e| BenchError::Config(format!("solver ({kind}, {}): {e}", setup_name(setup))))?;
            }
        }
        Ok(())
    }

    /// Estimator settings for one (kind, setup) cell of the experiment. The
    /// dual variable of starred kinds always uses the `l2` setup.
    pub fn estimator_config(&self, kind: EstimatorKind, setup: SetupChoice) -> Result<EstimatorConfig> {
        let sv = &self.solver;
        let lambda = match &sv.lambda {
            Some(LambdaSpec::Value(v)) => Lambda::Value(*v),
            Some(LambdaSpec::Word(_)) | None => Lambda::Auto,
        };
        let stopping = match sv.stopping {
            StoppingKind::Budget => Stopping::Budget,
            StoppingKind::Accuracy => Stopping::Accuracy(sv.accuracy.unwrap_or(0.0)),
            StoppingKind::Statistical => Stopping::Statistical { factor: sv.factor },
        };
        let averaging = match sv.averaging {
            AveragingKind::Uniform => Averaging::Uniform,
            AveragingKind::Suffix => Averaging::Suffix(sv.suffix_fraction),
        };
        let setup_v = if kind.is_starred() { SetupChoice::L2 } else { setup };
        let mut cfg = EstimatorConfig::new(kind)
            .with_r_bar(self.r_bar()?)
            .with_sigma(self.sigma()?)
            .with_lambda(lambda)
            .with_setups(setup, setup_v)
            .with_stopping(stopping)
            .with_max_iter(sv.max_iter)
            .with_adaptive(sv.adaptive);
        cfg.delta = sv.delta;
        cfg.averaging = averaging;
        cfg.stepsize = sv.stepsize;
        cfg.accuracy_constant = sv.accuracy_constant;
        Ok(cfg)
    }
}
