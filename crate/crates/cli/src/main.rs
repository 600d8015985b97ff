use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use shsbm_core::combinatorics::{sample_uniform, DEFAULT_CLASS_CAP};
use shsbm_core::experiments::{fano_experiment, heatmap_svg, run_batch, sweep, BatchSpec, GridFile, SweepSpec};
use shsbm_core::mle::{recovery_success, solve_with, Sense, SolveOptions};
use shsbm_core::model::{sample_weights, Hypothesis, Instance, TensorFile};
use shsbm_core::oracles::{documented_instances, exact_mi, run_suite, tail_check, LemmaId, TailBound, VerifyCaps};
use shsbm_core::rng::{derive_seed, rng_from_seed, STREAM_TRUTH, STREAM_WEIGHTS};
use shsbm_core::thresholds::{classify_with, preset_thresholds, DenominatorMode, Preset, ThresholdParams};
use shsbm_core::Error;

#[derive(Parser, Debug)]
#[command(name = "shsbm", version, about = "Exact recovery experiments for the sub-hypergraph stochastic block model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Worker threads (default: all cores).
    #[arg(long, env = "SHSBM_JOBS", global = true)]
    jobs: Option<usize>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ThresholdArgs {
    #[arg(long, default_value_t = 0.5)]
    c0: f64,
    /// Constant of the achievability condition.
    #[arg(long, default_value_t = 1.0)]
    constant: f64,
    /// Denominator of the achievability statistic: min, max or sigma.
    #[arg(long, default_value = "max")]
    mode: String,
    /// Denominator of the impossibility statistic: min or max.
    #[arg(long, default_value = "min")]
    lower_mode: String,
}

impl ThresholdArgs {
    fn params(&self) -> shsbm_core::Result<ThresholdParams> {
        ThresholdParams::new(self.c0, self.constant)?
            .with_modes(DenominatorMode::parse(&self.lower_mode)?, DenominatorMode::parse(&self.mode)?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a weight tensor from a model config.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON label array to plant instead of a uniform draw.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Omit zero weights.
        #[arg(long)]
        sparse: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive maximum likelihood recovery on a weight tensor.
    Recover {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// JSON label array to score the estimate against.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Minimize the within-community weight (the right objective when q > p).
        #[arg(long)]
        minimize: bool,
        /// Largest number of tensor classes to search.
        #[arg(long, default_value_t = DEFAULT_CLASS_CAP)]
        max_classes: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate and classify the threshold conditions for a config.
    Threshold {
        #[arg(long)]
        config: PathBuf,
        /// planted_sbm, densest_sub or multipartite.
        #[arg(long)]
        preset: Option<String>,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Repeated sample-and-recover trials at one config.
    Batch {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON label array planted in every trial.
        #[arg(long)]
        fixed_truth: Option<PathBuf>,
        #[arg(long)]
        minimize: bool,
        /// Include per-trial results.
        #[arg(long)]
        per_trial: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Success rates over a grid of configs.
    Sweep {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Heatmap of a 2-D (p, q) grid.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Run the exhaustive combinatorial and analytic checks.
    Verify {
        /// `all` or a comma-separated list of check ids.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        max_r: usize,
        #[arg(long, default_value_t = 4)]
        max_k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Exact mutual information for a small Bernoulli config.
    Mi {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// MLE error rate against the Fano floor (r = 1).
    Fano {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo checks of the tail bounds on the built-in instances.
    Tail {
        /// bernstein or hoeffding.
        #[arg(long, default_value = "bernstein")]
        bound: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Sample { common, .. }
            | Command::Recover { common, .. }
            | Command::Threshold { common, .. }
            | Command::Batch { common, .. }
            | Command::Sweep { common, .. }
            | Command::Verify { common, .. }
            | Command::Mi { common, .. }
            | Command::Fano { common, .. }
            | Command::Tail { common, .. } => common,
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?)
}

fn read_labels(path: &Path, r: usize, k: usize) -> anyhow::Result<Hypothesis> {
    let labels: Vec<usize> = read_json(path)?;
    Ok(Hypothesis::new(labels, r, k)?)
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn emit<T: Serialize>(common: &Common, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value).context("serializing output")?;
    text.push('\n');
    match &common.out {
        Some(path) => write_text(path, &text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct RecoverOutput {
    best_score: f64,
    argmax_count: usize,
    unique: bool,
    hypothesis: Vec<usize>,
    classes_evaluated: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    success: Option<bool>,
}

/// Outcome of a command: `false` makes the process exit with status 1.
fn run(cmd: Command) -> anyhow::Result<bool> {
    let common = cmd.common().clone();
    let jobs = common.jobs;
    if jobs == Some(0) {
        return Err(Error::InvalidConfig("--jobs must be at least 1".into()).into());
    }
    match cmd {
        Command::Sample { config, seed, truth, sparse, .. } => {
            let inst: Instance = read_json(&config)?;
            let (din, dout) = inst.distributions()?;
            let c = inst.config;
            let y = match truth {
                Some(path) => read_labels(&path, c.r, c.k)?,
                None => sample_uniform(c.n, c.r, c.k, &mut rng_from_seed(derive_seed(seed, STREAM_TRUTH)))?,
            };
            let t = sample_weights(&c, &y, &din, &dout, derive_seed(seed, STREAM_WEIGHTS))?;
            let mut file = TensorFile::from_tensor(&t, sparse.then_some(0.0));
            file.dist_in = Some(din);
            file.dist_out = Some(dout);
            file.seed = Some(seed);
            file.truth = Some(y.labels().to_vec());
            emit(&common, &file)?;
        }
        Command::Recover { weights, r, k, truth, minimize, max_classes, .. } => {
            let file: TensorFile = read_json(&weights)?;
            let tensor = file.to_tensor()?;
            let (r, k) = (r.unwrap_or(file.config.r), k.unwrap_or(file.config.k));
            let truth = match truth {
                Some(path) => Some(read_labels(&path, r, k)?),
                None if r == file.config.r && k == file.config.k => file.truth_hypothesis()?,
                None => None,
            };
            let sense = if minimize { Sense::Minimize } else { Sense::Maximize };
            let res = solve_with(&tensor, r, k, SolveOptions { sense, jobs, cap: max_classes, chunks: None })?;
            let out = RecoverOutput {
                best_score: res.best_score,
                argmax_count: res.argmax_classes.len(),
                unique: res.unique,
                hypothesis: res.argmax_classes[0].labels().to_vec(),
                classes_evaluated: res.classes_evaluated,
                success: truth.map(|y| recovery_success(&res, &y)),
            };
            emit(&common, &out)?;
        }
        Command::Threshold { config, preset, thresholds, .. } => {
            let inst: Instance = read_json(&config)?;
            let params = thresholds.params()?;
            let report = match preset {
                Some(name) => preset_thresholds(Preset::parse(&name)?, &inst.config, &params)?,
                None => {
                    let (din, dout) = inst.distributions()?;
                    classify_with(&inst.config, &params, &din, &dout)?
                }
            };
            emit(&common, &report)?;
        }
        Command::Batch { config, trials, seed, fixed_truth, minimize, per_trial, .. } => {
            let inst: Instance = read_json(&config)?;
            let (din, dout) = inst.distributions()?;
            let c = inst.config;
            let mut spec = BatchSpec::new(c, din, dout, trials, seed);
            spec.jobs = jobs;
            spec.keep_trials = per_trial;
            spec.fixed_truth = fixed_truth.map(|p| read_labels(&p, c.r, c.k)).transpose()?;
            spec.sense = minimize.then_some(Sense::Minimize);
            emit(&common, &run_batch(&spec)?)?;
        }
        Command::Sweep { grid, trials, seed, csv, svg, thresholds, .. } => {
            let text = fs::read_to_string(&grid).map_err(|e| Error::Io(format!("{}: {e}", grid.display())))?;
            let points = GridFile::parse(&text)?.expand()?;
            let mut spec = SweepSpec::new(points.clone(), trials, seed);
            spec.jobs = jobs;
            spec.params = thresholds.params()?;
            let res = sweep(&spec)?;
            if let Some(path) = csv {
                write_text(&path, &res.to_csv_string()?)?;
            }
            if let Some(path) = svg {
                write_text(&path, &heatmap_svg(&res, &points[0])?)?;
            }
            emit(&common, &res)?;
        }
        Command::Verify { suite, max_n, max_r, max_k, seed, .. } => {
            let ids = if suite == "all" {
                LemmaId::ALL.to_vec()
            } else {
                suite.split(',').map(|s| LemmaId::parse(s.trim())).collect::<shsbm_core::Result<Vec<_>>>()?
            };
            let caps = VerifyCaps { max_n, max_r, max_k, seed, ..VerifyCaps::default() };
            let report = in_pool(jobs, || run_suite(&ids, &caps))??;
            emit(&common, &report)?;
            return Ok(report.passed);
        }
        Command::Mi { config, .. } => {
            let inst: Instance = read_json(&config)?;
            let res = in_pool(jobs, || exact_mi(&inst.config))??;
            emit(&common, &res)?;
        }
        Command::Fano { config, trials, seed, .. } => {
            let inst: Instance = read_json(&config)?;
            let res = fano_experiment(&inst.config, trials, seed, jobs)?;
            emit(&common, &res)?;
            return Ok(res.pass);
        }
        Command::Tail { bound, samples, seed, .. } => {
            let kind = TailBound::parse(&bound)?;
            let mut out = Vec::new();
            for inst in documented_instances()? {
                let check = in_pool(jobs, || {
                    tail_check(&inst.config, &inst.dist_in, &inst.dist_out, &inst.y, &inst.y_star, samples, kind, seed)
                })??;
                out.push(serde_json::json!({ "instance": inst.name, "check": check }));
            }
            let passed = out.iter().all(|v| v["check"]["report"]["passed"] == serde_json::Value::Bool(true));
            emit(&common, &serde_json::json!({ "passed": passed, "checks": out }))?;
            return Ok(passed);
        }
    }
    Ok(true)
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match jobs {
        Some(j) => Ok(rayon::ThreadPoolBuilder::new().num_threads(j).build()?.install(f)),
        None => Ok(f()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let (kind, message) = match err.downcast_ref::<Error>() {
                Some(e) => (e.kind(), e.to_string()),
                None => ("internal", format!("{err:#}")),
            };
            eprintln!("error: {message}");
            println!("{}", serde_json::json!({ "error": kind, "message": message }));
            ExitCode::from(1)
        }
    }
}
