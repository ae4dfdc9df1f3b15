//! Command-line interface.
//!
//! Exit codes: 0 success, 1 validation failure (bad configuration values or
//! a failed bound check), 2 usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::validate::{self, ValidationConfig, ValidationRow};
use crate::bounds::{self, AlgoParams, ConditionReport, Theorem};
use crate::config::{self, ConfigError, ConfigFile, Overrides, Resolved};
use crate::env::{AttackStrategy, Scenario, DEFAULT_KILLER_MAGNITUDE};
use crate::exec::Execution;
use crate::harness::{self, ExperimentResult, FitReport, HarnessError};
use crate::plot::{self, Metric};
use crate::policies::{PolicyConfig, ALL_TAGS};
use crate::rng;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Bound(#[from] bounds::BoundError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_VALIDATION,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(name = "robust-mab", version, about = "Bandit simulations under unbounded reward attacks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and write per-policy CSVs and a manifest.
    Run(RunArgs),
    /// Run every algorithm (or a chosen subset) and print a summary table.
    Compare(RunArgs),
    /// Monte Carlo checks of the concentration bounds, plus condition reports.
    ValidateBounds(ValidateArgs),
    /// Classify the growth of a regret curve CSV.
    Fit(FitArgs),
    /// List built-in presets.
    Presets,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML experiment file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Attack probability.
    #[arg(long)]
    pub rho: Option<f64>,
    /// none, targeted-uniform, constant-offset or median-killer.
    #[arg(long)]
    pub attack: Option<String>,
    /// Attack size: uniform range, offset, or killer magnitude.
    #[arg(long)]
    pub magnitude: Option<f64>,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Comma separated algorithm tags.
    #[arg(long, value_delimiter = ',')]
    pub policies: Option<Vec<String>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// med-E-UCB block size G.
    #[arg(long)]
    pub group_size: Option<u64>,
    /// med-E-UCB exploration constant b.
    #[arg(long)]
    pub b: Option<f64>,
    /// Median UCB confidence constant ω.
    #[arg(long)]
    pub omega: Option<f64>,
    /// ε-greedy exploration constant c.
    #[arg(long)]
    pub c: Option<f64>,
    /// Output directory.
    #[arg(long, env = "ROBUST_MAB_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads; 1 runs serially. Defaults to all cores.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Also write SVG figures.
    #[arg(long)]
    pub plot: bool,
    /// Also write one CSV per trial.
    #[arg(long)]
    pub per_trial: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Repetitions per tail-bound cell.
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    /// Replicate worlds for the coverage check.
    #[arg(long, default_value_t = 10_000)]
    pub worlds: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, env = "ROBUST_MAB_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Multiply analytical bounds by this factor (for testing the verdicts).
    #[arg(long, default_value_t = 1.0, hide = true)]
    pub bound_scale: f64,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Curve CSV with header t,mean_regret,std_regret,optimal_pull_rate.
    pub csv: PathBuf,
    #[arg(long, default_value_t = 1_000)]
    pub t_min: u64,
    #[arg(long)]
    pub t_max: Option<u64>,
    /// Print the report as JSON only.
    #[arg(long)]
    pub json: bool,
}

fn execution(parallelism: Option<usize>) -> Result<Execution, CliError> {
    match parallelism {
        None => Ok(Execution::default_available()),
        Some(0) => Err(CliError::Usage("--parallelism must be at least 1".into())),
        Some(1) => Ok(Execution::Serial),
        Some(n) => Ok(Execution::Threads { threads: n }),
    }
}

fn attack_strategy(name: &str, magnitude: Option<f64>) -> Result<AttackStrategy, CliError> {
    if let Some(m) = magnitude {
        if !(m > 0.0 && m.is_finite()) {
            return Err(CliError::Config(ConfigError::Invalid(format!("magnitude = {m} must be positive"))));
        }
    }
    Ok(match name {
        "none" => AttackStrategy::None,
        "targeted-uniform" => AttackStrategy::TargetedUniform {
            magnitude: magnitude.unwrap_or(1800.0),
        },
        "constant-offset" => AttackStrategy::ConstantOffset {
            offset: magnitude.unwrap_or(40.0),
        },
        "median-killer" => AttackStrategy::MedianKiller {
            magnitude: magnitude.unwrap_or(DEFAULT_KILLER_MAGNITUDE),
        },
        other => return Err(CliError::Usage(format!("unknown attack {other:?}"))),
    })
}

/// Resolve run arguments against the config file and presets.
pub fn resolve_run(args: &RunArgs, default_policies: Option<&[&str]>) -> Result<Resolved, CliError> {
    let file = args.config.as_deref().map(ConfigFile::load).transpose()?;
    let attack = match (&args.attack, args.magnitude) {
        (Some(name), m) => Some(attack_strategy(name, m)?),
        (None, Some(_)) => return Err(CliError::Usage("--magnitude needs --attack".into())),
        (None, None) => None,
    };
    let policies = args.policies.clone().or_else(|| {
        let file_has = file.as_ref().is_some_and(|f| !f.policies.is_empty());
        match default_policies {
            Some(d) if !file_has => Some(d.iter().map(|s| s.to_string()).collect()),
            _ => None,
        }
    });
    let over = Overrides {
        preset: args.preset.clone(),
        rho: args.rho,
        attack,
        horizon: args.horizon,
        policies,
        trials: args.trials,
        seed: args.seed,
        group_size: args.group_size,
        b: args.b,
        omega: args.omega,
        c: args.c,
        output: args.out.clone(),
    };
    Ok(config::resolve(file.as_ref(), &over)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestPolicy {
    pub label: String,
    pub config: PolicyConfig,
    pub csv: String,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_path: Option<String>,
    pub preset: Option<String>,
    pub scenario: Scenario,
    pub policies: Vec<ManifestPolicy>,
    pub master_seed: u64,
    pub trials: u64,
    pub trial_seeds: Vec<u64>,
    pub output_dir: String,
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub resolved: Resolved,
    pub result: ExperimentResult,
    pub manifest: RunManifest,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(io_err(path))
}

/// Execute `run`: simulate, then write CSVs, the manifest and optional plots.
pub fn cmd_run(args: &RunArgs) -> Result<RunOutcome, CliError> {
    let exec = execution(args.parallelism)?;
    let resolved = resolve_run(args, None)?;
    run_resolved(args, resolved, exec)
}

fn run_resolved(args: &RunArgs, resolved: Resolved, exec: Execution) -> Result<RunOutcome, CliError> {
    let result = harness::run_experiment(
        &resolved.scenario,
        &resolved.policies,
        resolved.trials,
        resolved.seed,
        exec,
    )?;
    let dir = &resolved.output;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let labels = harness::policy_labels(&resolved.policies);
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for ((label, config), curve) in labels.iter().zip(&resolved.policies).zip(&result.curves) {
        let name = format!("{label}.csv");
        let mut buf = Vec::new();
        harness::write_curve_csv(curve, &mut buf)?;
        write_file(&dir.join(&name), &buf)?;
        files.push(name.clone());
        entries.push(ManifestPolicy {
            label: label.clone(),
            config: config.clone(),
            csv: name,
        });
    }
    if args.per_trial {
        let sub = dir.join("trials");
        fs::create_dir_all(&sub).map_err(io_err(&sub))?;
        for traces in &result.traces {
            for tr in traces {
                let name = format!("trials/{}-{}.csv", tr.policy, tr.trial);
                let mut buf = Vec::new();
                harness::write_trace_csv(tr, &mut buf)?;
                write_file(&dir.join(&name), &buf)?;
                files.push(name);
            }
        }
    }
    if args.plot {
        for (name, metric, title) in [
            ("regret.svg", Metric::MeanRegret, "Mean regret"),
            ("optimal_pull_rate.svg", Metric::OptimalPullRate, "Optimal pull rate"),
        ] {
            let svg = plot::render(&result.curves, metric, title);
            write_file(&dir.join(name), svg.as_bytes())?;
            files.push(name.to_string());
        }
    }
    files.push("manifest.json".to_string());
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config_path: args.config.as_ref().map(|p| p.display().to_string()),
        preset: resolved.preset.clone(),
        scenario: resolved.scenario.clone(),
        policies: entries,
        master_seed: resolved.seed,
        trials: resolved.trials,
        trial_seeds: (0..resolved.trials).map(|i| rng::mix(resolved.seed, i)).collect(),
        output_dir: dir.display().to_string(),
        files,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&dir.join("manifest.json"), format!("{json}\n").as_bytes())?;
    Ok(RunOutcome {
        resolved,
        result,
        manifest,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub policy: String,
    pub final_regret: f64,
    pub std_regret: f64,
    pub last_decile_optimal_rate: f64,
    pub growth: Option<harness::Growth>,
}

pub fn summarize(result: &ExperimentResult) -> Vec<SummaryRow> {
    result
        .curves
        .iter()
        .map(|c| {
            let last = c.final_point().copied();
            let horizon = c.horizon();
            SummaryRow {
                policy: c.policy.clone(),
                final_regret: last.map_or(0.0, |p| p.mean_regret),
                std_regret: last.map_or(0.0, |p| p.std_regret),
                last_decile_optimal_rate: c.window_optimal_rate(0.1).unwrap_or(f64::NAN),
                growth: harness::fit_growth(c, harness::DENSE_CHECKPOINTS.min(horizon / 100).max(1), horizon)
                    .ok()
                    .map(|f| f.classification),
            }
        })
        .collect()
}

fn print_summary<W: Write>(rows: &[SummaryRow], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<20} {:>14} {:>12} {:>12} {:>14}",
        "policy", "mean R_T", "std R_T", "last 10%", "growth"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<20} {:>14.1} {:>12.1} {:>12.4} {:>14}",
            r.policy,
            r.final_regret,
            r.std_regret,
            r.last_decile_optimal_rate,
            r.growth.map_or_else(|| "-".to_string(), |g| g.to_string())
        )?;
    }
    Ok(())
}

/// `compare`: like `run`, defaulting to all nine algorithms, plus a table.
pub fn cmd_compare(args: &RunArgs) -> Result<(RunOutcome, Vec<SummaryRow>), CliError> {
    let exec = execution(args.parallelism)?;
    let resolved = resolve_run(args, Some(&ALL_TAGS))?;
    let outcome = run_resolved(args, resolved, exec)?;
    let rows = summarize(&outcome.result);
    let json = serde_json::to_string_pretty(&rows).expect("summary serializes");
    let path = outcome.resolved.output.join("summary.json");
    write_file(&path, format!("{json}\n").as_bytes())?;
    Ok((outcome, rows))
}

/// Condition reports for the theorems at the paper-k10 setup with the
/// Gaussian theory-compliant constants and the experimental defaults.
pub fn condition_reports() -> Result<Vec<(String, ConditionReport)>, CliError> {
    let scenario = crate::env::preset("paper-k10").expect("preset exists");
    let dmin = scenario.min_gap();
    let sigma = scenario.shared_sigma().unwrap_or(1.0);
    let rho = scenario.attack().rho;
    let g = bounds::gaussian_params(dmin, sigma, rho)?;
    let analysis = g.analysis(scenario.best_mean(), dmin, rho, 0.05);
    let horizon = scenario.horizon() as f64;
    let k = scenario.num_arms();
    // ω large enough for the high-probability statement as well
    let omega = 3.5 / (g.l * g.l);
    let b = g.b_min.max(omega);
    let group = crate::policies::min_feasible_group(k, b, scenario.horizon()).unwrap_or(0);
    let theory = AlgoParams {
        b,
        omega,
        group_size: group,
        c: bounds::eps_greedy_c_floor(Theorem::MedEpsGreedyPseudo, scenario.arms(), &analysis) * 1.0001,
    };
    let defaults = AlgoParams {
        b: 4.0,
        omega: 4.0,
        group_size: 1000,
        c: 10.0,
    };
    let mut out = Vec::new();
    for (name, algo) in [("theory", theory), ("experiment-defaults", defaults)] {
        for th in [
            Theorem::MedEUcbPseudo,
            Theorem::MedEUcbHighProb,
            Theorem::MedEpsGreedyPseudo,
            Theorem::MedEpsGreedyHighProb,
            Theorem::GaussianMedEUcb,
            Theorem::GaussianMedEpsGreedy,
        ] {
            out.push((
                name.to_string(),
                bounds::check_conditions(th, scenario.arms(), &analysis, &algo, horizon),
            ));
        }
    }
    Ok(out)
}

pub struct ValidateOutcome {
    pub rows: Vec<ValidationRow>,
    pub report_path: PathBuf,
}

impl ValidateOutcome {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

pub fn cmd_validate_bounds(args: &ValidateArgs) -> Result<ValidateOutcome, CliError> {
    if args.reps == 0 || args.worlds == 0 {
        return Err(CliError::Config(ConfigError::Invalid("reps and worlds must be positive".into())));
    }
    if !(args.bound_scale > 0.0 && args.bound_scale.is_finite()) {
        return Err(CliError::Config(ConfigError::Invalid("bound scale must be positive".into())));
    }
    let cfg = ValidationConfig {
        reps: args.reps,
        worlds: args.worlds,
        seed: args.seed,
        execution: execution(args.parallelism)?,
        bound_scale: args.bound_scale,
    };
    let rows = validate::run_suite(&cfg)?;
    let dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUTPUT));
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let report_path = dir.join("bounds_report.csv");
    let mut buf = Vec::new();
    validate::write_csv(&rows, &mut buf).map_err(|e| CliError::Failed(e.to_string()))?;
    write_file(&report_path, &buf)?;
    let reports = condition_reports()?;
    let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
    write_file(&dir.join("conditions.json"), format!("{json}\n").as_bytes())?;
    Ok(ValidateOutcome { rows, report_path })
}

pub fn cmd_fit(args: &FitArgs) -> Result<FitReport, CliError> {
    let file = fs::File::open(&args.csv).map_err(io_err(&args.csv))?;
    let name = args
        .csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let curve = harness::read_curve_csv(&name, std::io::BufReader::new(file)).map_err(|e| match e {
        HarnessError::Parse { row, message } => {
            CliError::Failed(format!("{}: row {row}: {message}", args.csv.display()))
        }
        other => other.into(),
    })?;
    let t_max = args.t_max.unwrap_or_else(|| curve.horizon());
    Ok(harness::fit_growth(&curve, args.t_min, t_max)?)
}

fn report_error(e: &CliError) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    match cli.command {
        Command::Run(a) => match cmd_run(&a) {
            Ok(o) => {
                let _ = writeln!(
                    stdout.lock(),
                    "wrote {} files to {}",
                    o.manifest.files.len(),
                    o.resolved.output.display()
                );
                EXIT_OK
            }
            Err(e) => report_error(&e),
        },
        Command::Compare(a) => match cmd_compare(&a) {
            Ok((_, rows)) => {
                let _ = print_summary(&rows, stdout.lock());
                EXIT_OK
            }
            Err(e) => report_error(&e),
        },
        Command::ValidateBounds(a) => match cmd_validate_bounds(&a) {
            Ok(o) => {
                let mut out = stdout.lock();
                for r in &o.rows {
                    let _ = writeln!(
                        out,
                        "{} {:<42} {:<58} bound={:.6e} empirical={:.6e}",
                        r.verdict(),
                        r.formula,
                        r.params,
                        r.bound,
                        r.empirical
                    );
                }
                let _ = writeln!(out, "report: {}", o.report_path.display());
                if o.passed() {
                    EXIT_OK
                } else {
                    EXIT_VALIDATION
                }
            }
            Err(e) => report_error(&e),
        },
        Command::Fit(a) => match cmd_fit(&a) {
            Ok(r) => {
                let mut out = stdout.lock();
                let json = serde_json::to_string_pretty(&r).expect("report serializes");
                if !a.json {
                    let _ = writeln!(out, "classification: {}", r.classification);
                    let _ = writeln!(
                        out,
                        "log fit:    {:.6} ln t + {:.6} (R^2 {:.4}, SSE {:.6e})",
                        r.log.slope, r.log.intercept, r.log.r2, r.log.sse
                    );
                    let _ = writeln!(
                        out,
                        "linear fit: {:.6e} t + {:.6} (R^2 {:.4}, SSE {:.6e})",
                        r.linear.slope, r.linear.intercept, r.linear.r2, r.linear.sse
                    );
                }
                let _ = writeln!(out, "{json}");
                EXIT_OK
            }
            Err(e) => report_error(&e),
        },
        Command::Presets => {
            let mut out = stdout.lock();
            for p in config::presets() {
                let _ = writeln!(out, "{:<18} {}", p.name, p.description);
            }
            EXIT_OK
        }
    }
}
