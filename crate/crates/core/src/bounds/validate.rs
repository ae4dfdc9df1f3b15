//! Monte Carlo checks of the concentration lemmas.
//!
//! Each cell compares an empirical tail frequency with its analytical bound
//! and passes when `empirical <= bound + 3 sqrt(bound / reps)`. The
//! attacked-fraction lemma is checked by coverage: the share of simulated
//! worlds in which some arm's attacked fraction exceeds `ρ + ε₀` after `N`
//! pulls must not exceed `δ`.
//!
//! Work is split into fixed chunks, each with its own random stream, so the
//! counts do not depend on how chunks are scheduled.

use rand::Rng;
use rand_distr::StandardNormal as Gauss;
use serde::Serialize;

use super::{lemma3_min_samples, quantile_tail_bounds, BoundError, Lemma3Variant, StandardNormal};
use crate::estimators::quantile_rank;
use crate::exec::{map_indexed, Execution};
use crate::rng::{self, StreamRole};

/// Magnitude written over corrupted samples.
pub const CORRUPTION: f64 = 1e9;

const CHUNK: u64 = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationConfig {
    /// Monte Carlo repetitions per tail-bound cell.
    pub reps: u64,
    /// Replicate worlds for the coverage check.
    pub worlds: u64,
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
    /// Multiplies every analytical bound before the verdict. Anything but 1
    /// is only useful for checking that the verdict can fail.
    pub bound_scale: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            reps: 100_000,
            worlds: 10_000,
            seed: 42,
            execution: Execution::default_available(),
            bound_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub formula: String,
    pub params: String,
    pub bound: f64,
    pub empirical: f64,
    /// Largest empirical value that still passes.
    pub threshold: f64,
    pub passed: bool,
}

impl ValidationRow {
    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

pub const MEDIAN_GRID_N: [usize; 3] = [50, 100, 200];
pub const MEDIAN_GRID_S: [f64; 2] = [0.1, 0.2];
pub const MEDIAN_GRID_A: [f64; 2] = [0.1, 0.3];
pub const QUANTILE_GRID_P: [f64; 2] = [0.3, 0.7];
pub const QUANTILE_DEVIATION: f64 = 0.2;

/// Coverage check constants: paper-k10 arm count and ρ, with `ε₀` just
/// above `s - ρ` for the Gaussian threshold at `Δ_min = 2`.
pub const COVERAGE_ARMS: usize = 10;
pub const COVERAGE_RHO: f64 = 0.125;
pub const COVERAGE_EPSILON0: f64 = 0.0665;
pub const COVERAGE_DELTA: f64 = 0.05;
/// Pull sequences are followed up to this multiple of `N`.
pub const COVERAGE_HORIZON_FACTOR: u64 = 3;

fn tail_threshold(bound: f64, reps: u64) -> f64 {
    bound + 3.0 * (bound / reps as f64).sqrt()
}

/// Counts of `(lower events per a, upper events per b)` for one cell.
fn tail_counts(
    cfg: &ValidationConfig,
    cell: u64,
    n: usize,
    s: f64,
    p: f64,
    deviations: &[f64],
) -> (Vec<u64>, Vec<u64>) {
    let k = (s * n as f64).floor() as usize;
    let r = quantile_rank(p, n);
    let lo_q = crate::normal::quantile(p - s);
    let hi_q = crate::normal::quantile(p + s);
    let chunks = cfg.reps.div_ceil(CHUNK);
    let per_chunk = map_indexed(chunks, cfg.execution, |c| {
        let mut rng = rng::stream(rng::mix(cfg.seed, cell), c, StreamRole::Replicate);
        let reps = CHUNK.min(cfg.reps - c * CHUNK);
        let mut lower = vec![0u64; deviations.len()];
        let mut upper = vec![0u64; deviations.len()];
        let mut clean = vec![0.0; n];
        let mut work = vec![0.0; n];
        for _ in 0..reps {
            for x in clean.iter_mut() {
                *x = rng.sample(Gauss);
            }
            clean.sort_unstable_by(f64::total_cmp);
            // Worst case for the lower tail: the k largest samples are
            // replaced by a huge negative value, and symmetrically above.
            work.copy_from_slice(&clean);
            for x in &mut work[n - k..] {
                *x = -CORRUPTION;
            }
            let down = *work.select_nth_unstable_by(r - 1, f64::total_cmp).1;
            work.copy_from_slice(&clean);
            for x in &mut work[..k] {
                *x = CORRUPTION;
            }
            let up = *work.select_nth_unstable_by(r - 1, f64::total_cmp).1;
            for (i, &d) in deviations.iter().enumerate() {
                lower[i] += u64::from(down - lo_q <= -d);
                upper[i] += u64::from(up - hi_q >= d);
            }
        }
        (lower, upper)
    });
    let mut lower = vec![0u64; deviations.len()];
    let mut upper = vec![0u64; deviations.len()];
    for (l, u) in per_chunk {
        for i in 0..deviations.len() {
            lower[i] += l[i];
            upper[i] += u[i];
        }
    }
    (lower, upper)
}

fn tail_rows(
    cfg: &ValidationConfig,
    cell: u64,
    formula: &str,
    n: usize,
    s: f64,
    p: f64,
    deviations: &[f64],
) -> Result<Vec<ValidationRow>, BoundError> {
    let (lower, upper) = tail_counts(cfg, cell, n, s, p, deviations);
    let mut rows = Vec::new();
    for (i, &d) in deviations.iter().enumerate() {
        let b = quantile_tail_bounds(n as u64, s, p, d, d, &StandardNormal)?;
        for (tail, bound, count) in [("lower", b.lower, lower[i]), ("upper", b.upper, upper[i])] {
            let bound = bound * cfg.bound_scale;
            let empirical = count as f64 / cfg.reps as f64;
            let threshold = tail_threshold(bound, cfg.reps);
            rows.push(ValidationRow {
                formula: formula.to_string(),
                params: format!("n={n};s={s};p={p};dev={d};tail={tail};reps={}", cfg.reps),
                bound,
                empirical,
                threshold,
                passed: empirical <= threshold,
            });
        }
    }
    Ok(rows)
}

/// Sample-median tail bounds over the `n × s × a` grid, both tails.
pub fn median_rows(cfg: &ValidationConfig) -> Result<Vec<ValidationRow>, BoundError> {
    let mut rows = Vec::new();
    let mut cell = 0;
    for &n in &MEDIAN_GRID_N {
        for &s in &MEDIAN_GRID_S {
            rows.extend(tail_rows(cfg, cell, "median-tail", n, s, 0.5, &MEDIAN_GRID_A)?);
            cell += 1;
        }
    }
    Ok(rows)
}

/// Sample-quantile tail bounds over the `n × s × p` grid, both tails.
pub fn quantile_rows(cfg: &ValidationConfig) -> Result<Vec<ValidationRow>, BoundError> {
    let mut rows = Vec::new();
    let mut cell = 1_000;
    for &n in &MEDIAN_GRID_N {
        for &s in &MEDIAN_GRID_S {
            for &p in &QUANTILE_GRID_P {
                rows.extend(tail_rows(cfg, cell, "quantile-tail", n, s, p, &[QUANTILE_DEVIATION])?);
                cell += 1;
            }
        }
    }
    Ok(rows)
}

/// Whether every arm of one simulated world keeps its attacked fraction at
/// or below `ρ + ε₀` for all pull counts in `[N, horizon]`.
fn world_covered<R: Rng>(rng: &mut R, arms: usize, rho: f64, limit: f64, n_min: u64, horizon: u64) -> bool {
    let mut covered = true;
    for _ in 0..arms {
        let mut attacked = 0u64;
        for m in 1..=horizon {
            attacked += u64::from(rng.random::<f64>() < rho);
            if m >= n_min && attacked as f64 > limit * m as f64 {
                covered = false;
            }
        }
    }
    covered
}

/// Coverage of the attacked-fraction sample threshold.
pub fn coverage_row(cfg: &ValidationConfig, variant: Lemma3Variant) -> Result<ValidationRow, BoundError> {
    let n_min = lemma3_min_samples(COVERAGE_ARMS as u64, COVERAGE_EPSILON0, COVERAGE_DELTA, variant)?;
    let horizon = COVERAGE_HORIZON_FACTOR * n_min;
    let limit = COVERAGE_RHO + COVERAGE_EPSILON0;
    let cell = match variant {
        Lemma3Variant::Lemma => 2_000,
        Lemma3Variant::HighProbProof => 2_001,
    };
    let chunk = 100;
    let chunks = cfg.worlds.div_ceil(chunk);
    let failures: u64 = map_indexed(chunks, cfg.execution, |c| {
        let mut rng = rng::stream(rng::mix(cfg.seed, cell), c, StreamRole::Replicate);
        let worlds = chunk.min(cfg.worlds - c * chunk);
        (0..worlds)
            .filter(|_| !world_covered(&mut rng, COVERAGE_ARMS, COVERAGE_RHO, limit, n_min, horizon))
            .count() as u64
    })
    .into_iter()
    .sum();
    let bound = COVERAGE_DELTA * cfg.bound_scale;
    let empirical = failures as f64 / cfg.worlds as f64;
    let name = match variant {
        Lemma3Variant::Lemma => "attacked-fraction-coverage",
        Lemma3Variant::HighProbProof => "attacked-fraction-coverage-proof-variant",
    };
    Ok(ValidationRow {
        formula: name.to_string(),
        params: format!(
            "K={COVERAGE_ARMS};rho={COVERAGE_RHO};eps0={COVERAGE_EPSILON0};delta={COVERAGE_DELTA};N={n_min};m_max={horizon};worlds={}",
            cfg.worlds
        ),
        bound,
        empirical,
        threshold: bound,
        passed: empirical <= bound,
    })
}

/// The whole suite: median grid, quantile grid, both coverage variants.
pub fn run_suite(cfg: &ValidationConfig) -> Result<Vec<ValidationRow>, BoundError> {
    if cfg.reps == 0 || cfg.worlds == 0 {
        return Err(BoundError::Parameter("reps and worlds must be positive".into()));
    }
    let mut rows = median_rows(cfg)?;
    rows.extend(quantile_rows(cfg)?);
    rows.push(coverage_row(cfg, Lemma3Variant::Lemma)?);
    rows.push(coverage_row(cfg, Lemma3Variant::HighProbProof)?);
    Ok(rows)
}

/// CSV with columns `formula,params,bound,empirical,threshold,verdict`.
pub fn write_csv<W: std::io::Write>(rows: &[ValidationRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["formula", "params", "bound", "empirical", "threshold", "verdict"])?;
    for r in rows {
        w.write_record([
            r.formula.clone(),
            r.params.clone(),
            r.bound.to_string(),
            r.empirical.to_string(),
            r.threshold.to_string(),
            r.verdict().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
