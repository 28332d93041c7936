use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use convden::estimators::{solve, EstimatorConfig, EstimatorKind, Lambda, SetupChoice, Stopping};
use convden_bench::certify::certify;
use convden_bench::config::ExperimentConfig;
use convden_bench::error::{BenchError, Result};
use convden_bench::io::{read_signal_file, write_experiment, write_signal_file, SolutionFile};
use convden_bench::runner::run_experiment;
use convden_bench::scenario::{add_noise, sigma_for_snr, trial_rng, ScenarioKind};

/// Adaptive convolution-type denoising: scenario generation, single-signal
/// denoising, multi-trial benchmarks and certificate checks.
#[derive(Parser)]
#[command(name = "convden-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Ransin,
    Cohsin,
    Modsin,
}

#[derive(Clone, Copy, ValueEnum)]
enum StoppingArg {
    Budget,
    Accuracy,
    Statistical,
}

#[derive(Subcommand)]
enum Command {
    /// Write a scenario signal on [-n, n] as a tau,re,im CSV.
    Generate {
        #[arg(long, value_enum)]
        kind: ScenarioArg,
        /// Number of frequencies (pairs for cohsin).
        #[arg(long)]
        s: usize,
        /// Modulation degree (modsin only).
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trial index selecting the random stream.
        #[arg(long, default_value_t = 0)]
        trial: usize,
        /// Clean signal output.
        #[arg(long, short)]
        output: PathBuf,
        /// Also write an observation at this SNR to --noisy-output.
        #[arg(long, requires = "noisy_output")]
        snr: Option<f64>,
        #[arg(long, requires = "snr")]
        noisy_output: Option<PathBuf>,
    },
    /// Denoise one observation on [-n, n] and write the estimate on [0, n].
    Denoise {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
        /// con-uf, con-ls, pen-uf, pen-ls, con-ls-star or pen-ls-star.
        #[arg(long, default_value = "con-uf")]
        estimator: EstimatorKind,
        /// Proximal setup of the filter variable: l1 or l2.
        #[arg(long, default_value = "l2")]
        setup: SetupChoice,
        /// Filter norm budget (constrained estimators).
        #[arg(long)]
        r_bar: Option<f64>,
        /// Penalty weight, or "auto" (penalized estimators; auto needs --sigma).
        #[arg(long)]
        lambda: Option<String>,
        /// Noise level.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        #[arg(long, value_enum, default_value = "budget")]
        stopping: StoppingArg,
        /// Target accuracy with --stopping accuracy.
        #[arg(long)]
        accuracy: Option<f64>,
        /// Multiple of the statistical accuracy with --stopping statistical.
        #[arg(long, default_value_t = 1.0)]
        factor: f64,
        /// Backtracking stepsize search (mirror-prox estimators).
        #[arg(long)]
        adaptive: bool,
        /// Write the solution and its accuracy claim for `certify`.
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Write the filter on [0, n].
        #[arg(long)]
        filter: Option<PathBuf>,
    },
    /// Run a multi-trial experiment from a TOML config.
    ///
    /// Any config key can be overridden after the flags, e.g.
    /// `--scenario.snr=8 --solver.estimators='["con-ls"]'`.
    Bench {
        #[arg(long, short)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = all cores); overrides the config.
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides output.dir.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Re-check the accuracy claim of a solution written by `denoise`.
    Certify {
        #[arg(long, short)]
        solution: PathBuf,
    },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate {
            kind,
            s,
            m,
            n,
            seed,
            trial,
            output,
            snr,
            noisy_output,
        } => {
            let kind = match kind {
                ScenarioArg::Ransin => ScenarioKind::RanSin { s },
                ScenarioArg::Cohsin => ScenarioKind::CohSin { s },
                ScenarioArg::Modsin => ScenarioKind::ModSin { s, m },
            };
            let mut rng = trial_rng(seed, trial);
            let x = kind.generate(n, &mut rng)?;
            write_signal_file(&output, &x)?;
            if let (Some(snr), Some(path)) = (snr, noisy_output) {
                let sigma = sigma_for_snr(snr, n)?;
                write_signal_file(&path, &add_noise(&x, sigma, &mut rng)?)?;
                println!("{kind}: n={n} sigma={sigma}");
            }
            Ok(true)
        }
        Command::Denoise {
            input,
            output,
            estimator,
            setup,
            r_bar,
            lambda,
            sigma,
            max_iter,
            stopping,
            accuracy,
            factor,
            adaptive,
            solution,
            filter,
        } => {
            let y = read_signal_file(&input)?;
            if y.symmetric_half_length().is_none() {
                return Err(BenchError::Input(format!(
                    "{}: observation must cover [-n, n]",
                    input.display()
                )));
            }
            let setup_v = if estimator.is_starred() { SetupChoice::L2 } else { setup };
            let mut cfg = EstimatorConfig::new(estimator)
                .with_setups(setup, setup_v)
                .with_max_iter(max_iter)
                .with_adaptive(adaptive);
            cfg.r_bar = r_bar;
            cfg.sigma = sigma;
            cfg.lambda = match lambda.as_deref() {
                None => None,
                Some("auto") => Some(Lambda::Auto),
                Some(v) => Some(Lambda::Value(
                    v.parse()
                        .map_err(|_| BenchError::Input(format!("--lambda: expected a number or auto, got '{v}'")))?,
                )),
            };
            cfg.stopping = match stopping {
                StoppingArg::Budget => Stopping::Budget,
                StoppingArg::Accuracy => Stopping::Accuracy(
                    accuracy.ok_or_else(|| BenchError::Input("--stopping accuracy needs --accuracy".into()))?,
                ),
                StoppingArg::Statistical => Stopping::Statistical { factor },
            };
            let sol = solve(&y, &cfg)?;
            write_signal_file(&output, &sol.denoised)?;
            if let Some(path) = filter {
                write_signal_file(&path, &sol.filter_time)?;
            }
            if let Some(path) = solution {
                let file = SolutionFile::new(&y, &sol, setup, setup_v);
                serde_json::to_writer_pretty(std::fs::File::create(&path)?, &file)?;
            }
            let last = sol.trace.last();
            println!(
                "{estimator}: iterations={} stop={:?} objective={} certificate={} r={}",
                sol.trace.iterations,
                sol.trace.stop_reason,
                last.map(|r| r.objective.to_string()).unwrap_or_else(|| "-".into()),
                last.and_then(|r| r.certificate).map(|c| c.to_string()).unwrap_or_else(|| "-".into()),
                sol.r_realized
            );
            Ok(true)
        }
        Command::Bench {
            config,
            seed,
            threads,
            output_dir,
            overrides,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config, &overrides)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = threads {
                cfg.threads = t;
            }
            if let Some(d) = output_dir {
                cfg.output.dir = Some(d);
            }
            let result = run_experiment(&cfg)?;
            for f in &result.failures {
                eprintln!(
                    "trial {} ({}, {:?}) failed: {}",
                    f.trial, f.estimator, f.setup, f.message
                );
            }
            if let Some(dir) = &cfg.output.dir {
                let paths = write_experiment(dir, &cfg.name, &cfg.scenario_id()?, &result)?;
                eprintln!(
                    "wrote {}, {} and {}",
                    paths.trials.display(),
                    paths.aggregate.display(),
                    paths.summary.display()
                );
            }
            println!("{}", serde_json::to_string_pretty(&result.summaries)?);
            Ok(true)
        }
        Command::Certify { solution } => {
            let text = std::fs::read_to_string(&solution)?;
            let file: SolutionFile = serde_json::from_str(&text)
                .map_err(|e| BenchError::Input(format!("{}: {e}", solution.display())))?;
            let report = certify(&file)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.valid)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
