//! Oracles shared by the estimator tests and the acceptance run.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_mab::estimators::{catoni_psi, ArmStats};

const GRID: f64 = (1u64 << 40) as f64;

/// Inf-quantile of a sorted slice, written out from the definition.
pub fn oracle_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    // smallest k with k/n >= p
    let mut k = 1;
    while (k as f64) < p * n as f64 {
        k += 1;
    }
    sorted[k - 1]
}

/// Trimmed mean of values on the 2^-40 grid, summed exactly in i128.
pub fn oracle_trimmed(sorted: &[f64], alpha: f64) -> f64 {
    let n = sorted.len();
    let k = (alpha * n as f64).floor() as usize;
    if 2 * k >= n {
        return oracle_quantile(sorted, 0.5);
    }
    let kept = &sorted[k..n - k];
    let total: i128 = kept.iter().map(|&x| (x * GRID) as i128).sum();
    (total as f64 / GRID) / kept.len() as f64
}

fn grid_value(rng: &mut ChaCha8Rng) -> f64 {
    let x: f64 = match rng.random_range(0..4) {
        0 => rng.random_range(-1e6..1e6),
        1 => rng.random_range(-3.0..3.0),
        2 => (rng.random_range(-20..20) as f64) * 0.5,
        _ => rng.random_range(-1e3..1e3) * if rng.random_bool(0.1) { 1e3 } else { 1.0 },
    };
    (x * GRID).round() / GRID
}

const ALPHAS: [f64; 5] = [0.0, 0.05, 0.125, 0.3, 0.49];
const LEVELS: [f64; 7] = [0.01, 0.1, 0.25, 0.5, 0.7, 0.9, 0.99];

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Random insert sequences of length `1..=1000`, each queried along the way
/// for medians, quantiles, order statistics, trimmed means and the mean.
/// Returns the number of query points.
pub fn order_statistic_sweep(sequences: usize, seed: u64) -> Result<u64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queries = 0u64;
    for seq in 0..sequences {
        let len = rng.random_range(1..=1000);
        let tracked = ALPHAS[seq % ALPHAS.len()];
        let other = ALPHAS[(seq + 2) % ALPHAS.len()];
        let mut stats = ArmStats::with_tracked_trim(tracked).map_err(|e| e.to_string())?;
        let mut sorted: Vec<f64> = Vec::with_capacity(len);
        let query_every = if len <= 100 { 1 } else { len / 20 };
        for i in 1..=len {
            let x = grid_value(&mut rng);
            stats.insert(x).map_err(|e| e.to_string())?;
            let pos = sorted.partition_point(|&y| y <= x);
            sorted.insert(pos, x);
            if i % query_every != 0 && i != len {
                continue;
            }
            queries += 1;
            let ctx = || format!("sequence {seq}, n = {i}");
            check(stats.median().ok() == Some(oracle_quantile(&sorted, 0.5)), || format!("median, {}", ctx()))?;
            for &p in &LEVELS {
                check(stats.quantile(p).ok() == Some(oracle_quantile(&sorted, p)), || {
                    format!("quantile {p}, {}", ctx())
                })?;
            }
            let k = rng.random_range(1..=i);
            check(stats.order_statistic(k) == Some(sorted[k - 1]), || format!("order statistic {k}, {}", ctx()))?;
            for a in [tracked, other] {
                let got = stats.trimmed_mean(a).map_err(|e| e.to_string())?;
                check(got.to_bits() == oracle_trimmed(&sorted, a).to_bits(), || {
                    format!("trimmed mean {a}, {}", ctx())
                })?;
            }
            let mean = stats.mean().map_err(|e| e.to_string())?;
            check(mean.to_bits() == oracle_trimmed(&sorted, 0.0).to_bits(), || format!("mean, {}", ctx()))?;
        }
        check(stats.sorted().eq(sorted.iter().copied()), || format!("sorted order, sequence {seq}"))?;
    }
    Ok(queries)
}

/// Root of the decreasing Catoni objective by repeated 32-way grid refinement.
pub fn grid_root(xs: &[f64], alpha: f64) -> f64 {
    let f = |t: f64| xs.iter().map(|&x| catoni_psi(alpha * (x - t))).sum::<f64>();
    let mut lo = xs.iter().copied().fold(f64::INFINITY, f64::min) - 1.0 / alpha;
    let mut hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0 / alpha;
    while hi - lo > 1e-9 {
        let step = (hi - lo) / 32.0;
        let mut next = (lo, hi);
        for i in 1..32 {
            let t = lo + step * i as f64;
            if f(t) > 0.0 {
                next.0 = t;
            } else {
                next.1 = t;
                break;
            }
        }
        if next == (lo, hi) {
            break;
        }
        (lo, hi) = next;
    }
    0.5 * (lo + hi)
}

/// Catoni estimates of contaminated samples against [`grid_root`].
/// Returns the largest absolute difference seen.
pub fn catoni_sweep(cases: usize, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let len = rng.random_range(1..=200);
        let alpha = [0.05, 0.3, 1.0, 4.0][rng.random_range(0..4)];
        let centre: f64 = rng.random_range(-50.0..50.0);
        let mut stats = ArmStats::new();
        let mut xs = Vec::with_capacity(len);
        for _ in 0..len {
            let mut x = centre + rng.random_range(-2.0..2.0);
            if rng.random_bool(0.1) {
                x += rng.random_range(-1e4..1e4);
            }
            xs.push(x);
            stats.insert(x).map_err(|e| e.to_string())?;
        }
        let got = stats.catoni_estimate(alpha, 1e-9).map_err(|e| e.to_string())?;
        let want = grid_root(&xs, alpha);
        let err = (got - want).abs();
        worst = worst.max(err);
        check(err < 1e-6, || format!("case {case}: {got} vs {want}"))?;
    }
    Ok(worst)
}
