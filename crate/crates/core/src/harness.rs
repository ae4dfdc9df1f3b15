//! Seeded Monte Carlo trials, cross-trial aggregation and growth fits.
//!
//! Trial `i` of an experiment runs on seed `mix(master_seed, i)`. Every
//! policy sees the same seed for the same trial index, so environments
//! start from identical random streams across policies. Regret is measured
//! against the true arm means.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{AlgoParams, AnalysisParams, BoundError, Mode, Theorem};
use crate::env::{EnvError, Environment, Scenario};
use crate::exec::{map_indexed, Execution};
use crate::policies::{Policy, PolicyConfig, PolicyError};
use crate::rng;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("policy selected arm {arm} but there are only {arms}")]
    BadArm { arm: usize, arms: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Every round up to this is a checkpoint.
pub const DENSE_CHECKPOINTS: u64 = 1_000;
/// Ratio between consecutive checkpoints past the dense range.
pub const CHECKPOINT_RATIO: f64 = 1.1;
/// The horizon is also split into this many equal windows.
pub const WINDOW_DIVISIONS: u64 = 20;

/// Rounds at which a trace is recorded: `1..=1000`, then ×1.1 steps, the
/// multiples of `T/20` and `T` itself.
pub fn checkpoint_grid(horizon: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = (1..=horizon.min(DENSE_CHECKPOINTS)).collect();
    let mut t = DENSE_CHECKPOINTS as f64;
    loop {
        t = (t * CHECKPOINT_RATIO).ceil();
        if t >= horizon as f64 {
            break;
        }
        grid.push(t as u64);
    }
    for k in 1..WINDOW_DIVISIONS {
        grid.push(horizon * k / WINDOW_DIVISIONS);
    }
    grid.push(horizon);
    grid.retain(|&t| t >= 1 && t <= horizon);
    grid.sort_unstable();
    grid.dedup();
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: u64,
    /// `Σ_{τ<=t} (μ* - μ_{I_τ})`.
    pub regret: f64,
    pub optimal_pulls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialTrace {
    pub policy: String,
    pub trial: u64,
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
    /// Final pull count per arm.
    pub pulls: Vec<u64>,
    /// Rounds whose observation was attacked.
    pub attacked_rounds: u64,
}

impl TrialTrace {
    pub fn final_regret(&self) -> f64 {
        self.checkpoints.last().map_or(0.0, |c| c.regret)
    }
}

/// Regret from pull counts, `Σ_j Δ_j n_j`.
fn regret_of(gaps: &[f64], counts: &[u64]) -> f64 {
    gaps.iter().zip(counts).map(|(g, &n)| g * n as f64).sum()
}

/// Run one trial with an already built policy.
pub fn run_trial_with(
    scenario: &Scenario,
    policy: &mut dyn Policy,
    label: &str,
    seed: u64,
    trial: u64,
) -> Result<TrialTrace, HarnessError> {
    let arms = scenario.num_arms();
    let horizon = scenario.horizon();
    let grid = checkpoint_grid(horizon);
    let mut env = Environment::new(scenario, seed);
    let mut counts = vec![0u64; arms];
    let mut checkpoints = Vec::with_capacity(grid.len());
    let mut next = grid.iter().copied().peekable();
    let optimal = scenario.optimal_arm();
    let mut attacked_rounds = 0;
    for t in 1..=horizon {
        let arm = policy.select(t);
        if arm >= arms {
            return Err(HarnessError::BadArm { arm, arms });
        }
        let obs = env.step(arm)?;
        attacked_rounds += u64::from(obs.attacked);
        policy.observe(arm, obs.observed_reward);
        counts[arm] += 1;
        if next.peek() == Some(&t) {
            next.next();
            checkpoints.push(Checkpoint {
                t,
                regret: regret_of(scenario.gaps(), &counts),
                optimal_pulls: counts[optimal],
            });
        }
    }
    Ok(TrialTrace {
        policy: label.to_string(),
        trial,
        seed,
        checkpoints,
        pulls: counts,
        attacked_rounds,
    })
}

/// Build the policy for `seed` and run one trial.
pub fn run_trial(scenario: &Scenario, config: &PolicyConfig, seed: u64, trial: u64) -> Result<TrialTrace, HarnessError> {
    let mut policy = config.build(scenario, seed)?;
    run_trial_with(scenario, &mut policy, config.tag(), seed, trial)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: u64,
    pub mean_regret: f64,
    /// Population standard deviation across trials.
    pub std_regret: f64,
    /// Mean of `optimal pulls / t`.
    pub optimal_pull_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCurve {
    pub policy: String,
    pub trials: u64,
    pub points: Vec<CurvePoint>,
}

impl AggregateCurve {
    /// Aggregate traces in the given order. All traces must share a grid.
    pub fn from_traces(policy: &str, traces: &[TrialTrace]) -> Result<Self, HarnessError> {
        let first = traces
            .first()
            .ok_or_else(|| HarnessError::Invalid("no traces to aggregate".into()))?;
        let n = traces.len() as f64;
        let mut points = Vec::with_capacity(first.checkpoints.len());
        for (i, cp) in first.checkpoints.iter().enumerate() {
            let mut regrets = Vec::with_capacity(traces.len());
            let mut rate = 0.0;
            for tr in traces {
                let c = tr
                    .checkpoints
                    .get(i)
                    .filter(|c| c.t == cp.t)
                    .ok_or_else(|| HarnessError::Invalid("traces have different checkpoint grids".into()))?;
                regrets.push(c.regret);
                rate += c.optimal_pulls as f64 / c.t as f64;
            }
            let mean = regrets.iter().sum::<f64>() / n;
            let var = regrets.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
            points.push(CurvePoint {
                t: cp.t,
                mean_regret: mean,
                std_regret: var.sqrt(),
                optimal_pull_rate: rate / n,
            });
        }
        Ok(AggregateCurve {
            policy: policy.to_string(),
            trials: traces.len() as u64,
            points,
        })
    }

    pub fn horizon(&self) -> u64 {
        self.points.last().map_or(0, |p| p.t)
    }

    pub fn final_point(&self) -> Option<&CurvePoint> {
        self.points.last()
    }

    /// Mean optimal-pull rate over the last `fraction` of the horizon,
    /// measured from the latest checkpoint at or before `(1 - fraction) T`.
    pub fn window_optimal_rate(&self, fraction: f64) -> Option<f64> {
        let last = self.points.last()?;
        let cut = (last.t as f64 * (1.0 - fraction)).floor() as u64;
        let start = self.points.iter().rev().find(|p| p.t <= cut);
        let (t0, pulls0) = start.map_or((0, 0.0), |p| (p.t, p.optimal_pull_rate * p.t as f64));
        if last.t == t0 {
            return None;
        }
        let pulls1 = last.optimal_pull_rate * last.t as f64;
        Some(((pulls1 - pulls0) / (last.t - t0) as f64).clamp(0.0, 1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub curves: Vec<AggregateCurve>,
    /// Per policy, in trial order.
    pub traces: Vec<Vec<TrialTrace>>,
}

impl ExperimentResult {
    pub fn curve(&self, label: &str) -> Option<&AggregateCurve> {
        self.curves.iter().find(|c| c.policy == label)
    }
}

/// Labels for a policy list: the algorithm tag, suffixed `-2`, `-3`, ... on
/// repeats.
pub fn policy_labels(policies: &[PolicyConfig]) -> Vec<String> {
    let mut labels: Vec<String> = Vec::with_capacity(policies.len());
    for p in policies {
        let base = p.tag().to_string();
        let mut label = base.clone();
        let mut k = 2;
        while labels.contains(&label) {
            label = format!("{base}-{k}");
            k += 1;
        }
        labels.push(label);
    }
    labels
}

/// Run `trials` trials of every policy. Results do not depend on
/// `execution`.
pub fn run_experiment(
    scenario: &Scenario,
    policies: &[PolicyConfig],
    trials: u64,
    master_seed: u64,
    execution: Execution,
) -> Result<ExperimentResult, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::Invalid("trials must be at least 1".into()));
    }
    if policies.is_empty() {
        return Err(HarnessError::Invalid("no policies given".into()));
    }
    for p in policies {
        p.validate(scenario.num_arms())?;
    }
    let labels = policy_labels(policies);
    let jobs = policies.len() as u64 * trials;
    let results = map_indexed(jobs, execution, |job| {
        let p = (job / trials) as usize;
        let trial = job % trials;
        let seed = rng::mix(master_seed, trial);
        let mut policy = policies[p].build(scenario, seed)?;
        run_trial_with(scenario, &mut policy, &labels[p], seed, trial)
    });
    let mut traces: Vec<Vec<TrialTrace>> = vec![Vec::with_capacity(trials as usize); policies.len()];
    for (job, r) in results.into_iter().enumerate() {
        traces[job / trials as usize].push(r?);
    }
    let curves = labels
        .iter()
        .zip(&traces)
        .map(|(l, t)| AggregateCurve::from_traces(l, t))
        .collect::<Result<_, _>>()?;
    Ok(ExperimentResult { curves, traces })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Growth {
    Logarithmic,
    Linear,
    Indeterminate,
}

impl std::fmt::Display for Growth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Growth::Logarithmic => "logarithmic",
            Growth::Linear => "linear",
            Growth::Indeterminate => "indeterminate",
        })
    }
}

/// Least-squares line `slope x + intercept` with its residual sum and R².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub sse: f64,
    pub r2: f64,
}

fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 0.0 };
    LineFit {
        slope,
        intercept,
        sse,
        r2,
    }
}

/// Minimum R² for either model to be accepted.
pub const FIT_R2_MIN: f64 = 0.95;
/// Minimum number of checkpoints inside a fit window.
pub const FIT_MIN_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Fit of mean regret against `ln t`.
    pub log: LineFit,
    /// Fit of mean regret against `t`.
    pub linear: LineFit,
    pub points: usize,
    pub classification: Growth,
}

/// Classify the growth of mean regret over `[t_min, t_max]`.
pub fn fit_growth(curve: &AggregateCurve, t_min: u64, t_max: u64) -> Result<FitReport, HarnessError> {
    let window: Vec<&CurvePoint> = curve.points.iter().filter(|p| p.t >= t_min && p.t <= t_max).collect();
    if window.len() < FIT_MIN_POINTS {
        return Err(HarnessError::Invalid(format!(
            "{} checkpoints in [{t_min}, {t_max}], need at least {FIT_MIN_POINTS}",
            window.len()
        )));
    }
    let ys: Vec<f64> = window.iter().map(|p| p.mean_regret).collect();
    let ln_t: Vec<f64> = window.iter().map(|p| (p.t as f64).ln()).collect();
    let t: Vec<f64> = window.iter().map(|p| p.t as f64).collect();
    let log = fit_line(&ln_t, &ys);
    let linear = fit_line(&t, &ys);
    let degenerate = ys.iter().all(|&y| y == ys[0]);
    let classification = if degenerate {
        Growth::Indeterminate
    } else if log.sse < linear.sse && log.r2 >= FIT_R2_MIN {
        Growth::Logarithmic
    } else if linear.sse <= log.sse && linear.r2 >= FIT_R2_MIN {
        Growth::Linear
    } else {
        Growth::Indeterminate
    };
    Ok(FitReport {
        log,
        linear,
        points: window.len(),
        classification,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceRow {
    pub t: u64,
    pub bound: f64,
    pub mean_regret: f64,
    /// `bound - mean_regret`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub rows: Vec<DominanceRow>,
    pub dominated: bool,
}

impl DominanceReport {
    pub fn worst(&self) -> Option<&DominanceRow> {
        self.rows.iter().min_by(|a, b| a.margin.total_cmp(&b.margin))
    }
}

/// Compare a curve with `bound(t)` at every checkpoint.
pub fn compare_bound<F>(curve: &AggregateCurve, mut bound: F) -> Result<DominanceReport, HarnessError>
where
    F: FnMut(u64) -> Result<f64, BoundError>,
{
    let mut rows = Vec::with_capacity(curve.points.len());
    for p in &curve.points {
        let b = bound(p.t)?;
        rows.push(DominanceRow {
            t: p.t,
            bound: b,
            mean_regret: p.mean_regret,
            margin: b - p.mean_regret,
        });
    }
    let dominated = rows.iter().all(|r| r.margin >= 0.0);
    Ok(DominanceReport { rows, dominated })
}

/// [`compare_bound`] against a regret theorem. In checked mode its
/// conditions are verified once at the run's horizon, after which the
/// formula is evaluated at each checkpoint.
pub fn compare_theorem(
    curve: &AggregateCurve,
    scenario: &Scenario,
    theorem: Theorem,
    analysis: &AnalysisParams,
    algo: &AlgoParams,
    mode: Mode,
) -> Result<DominanceReport, HarnessError> {
    let arms = scenario.arms();
    if mode == Mode::Checked {
        crate::bounds::evaluate(theorem, arms, analysis, algo, scenario.horizon() as f64, Mode::Checked)?;
    }
    compare_bound(curve, |t| {
        crate::bounds::evaluate(theorem, arms, analysis, algo, t as f64, Mode::Unchecked)
    })
}

pub const CURVE_HEADER: [&str; 4] = ["t", "mean_regret", "std_regret", "optimal_pull_rate"];

/// CSV with header `t,mean_regret,std_regret,optimal_pull_rate`.
pub fn write_curve_csv<W: Write>(curve: &AggregateCurve, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER)?;
    for p in &curve.points {
        w.write_record([
            p.t.to_string(),
            p.mean_regret.to_string(),
            p.std_regret.to_string(),
            p.optimal_pull_rate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-trial CSV with header `t,regret,optimal_pulls`.
pub fn write_trace_csv<W: Write>(trace: &TrialTrace, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "regret", "optimal_pulls"])?;
    for c in &trace.checkpoints {
        w.write_record([c.t.to_string(), c.regret.to_string(), c.optimal_pulls.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Parse a curve CSV written by [`write_curve_csv`]. Errors name the
/// offending row, counting the header as row 1.
pub fn read_curve_csv<R: Read>(policy: &str, input: R) -> Result<AggregateCurve, HarnessError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(|e| HarnessError::Parse {
        row: 1,
        message: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>() != CURVE_HEADER {
        return Err(HarnessError::Parse {
            row: 1,
            message: format!("expected header {}", CURVE_HEADER.join(",")),
        });
    }
    let mut points = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| HarnessError::Parse {
            row,
            message: e.to_string(),
        })?;
        let field = |k: usize| -> Result<&str, HarnessError> {
            rec.get(k).ok_or_else(|| HarnessError::Parse {
                row,
                message: format!("missing column {}", CURVE_HEADER[k]),
            })
        };
        let num = |k: usize| -> Result<f64, HarnessError> {
            let s = field(k)?;
            s.trim().parse::<f64>().map_err(|_| HarnessError::Parse {
                row,
                message: format!("{} = {s:?} is not a number", CURVE_HEADER[k]),
            })
        };
        let t_raw = field(0)?;
        let t = t_raw.trim().parse::<u64>().map_err(|_| HarnessError::Parse {
            row,
            message: format!("t = {t_raw:?} is not a positive integer"),
        })?;
        if points.last().is_some_and(|p: &CurvePoint| p.t >= t) {
            return Err(HarnessError::Parse {
                row,
                message: "t must be strictly increasing".into(),
            });
        }
        points.push(CurvePoint {
            t,
            mean_regret: num(1)?,
            std_regret: num(2)?,
            optimal_pull_rate: num(3)?,
        });
    }
    Ok(AggregateCurve {
        policy: policy.to_string(),
        trials: 0,
        points,
    })
}
