//! Per-arm sample storage and robust location estimators.
//!
//! [`ArmStats`] holds every observed reward of one arm in an order-statistic
//! tree together with an exact running sum. All quantiles are the empirical
//! inf-quantile `θ_p = inf{x : F̂(x) >= p}`, i.e. the `⌈p·n⌉`-th order
//! statistic, so the median is the lower median for even `n`.

mod exact_sum;
mod ostree;

pub use exact_sum::ExactSum;
pub use ostree::OrderStatTree;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("non-finite sample {0}")]
    NonFinite(f64),
    #[error("no samples")]
    Empty,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("root search did not converge after {0} iterations")]
    NoConvergence(usize),
}

/// Index of the empirical inf-quantile: the smallest `k` with `k/n >= p`.
pub fn quantile_rank(p: f64, n: usize) -> usize {
    let nf = n as f64;
    let mut k = (p * nf).ceil().max(1.0) as usize;
    // p·n can land just above an integer in floating point.
    while k > 1 && ((k - 1) as f64) / nf >= p {
        k -= 1;
    }
    k.min(n)
}

/// Samples trimmed from each side for an α-trimmed mean over `n` samples.
#[inline]
pub fn trim_count(alpha: f64, n: usize) -> usize {
    (alpha * n as f64).floor() as usize
}

fn check_trim_alpha(alpha: f64) -> Result<(), EstimatorError> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(EstimatorError::InvalidParameter(format!(
            "trim fraction {alpha} outside [0, 0.5)"
        )));
    }
    Ok(())
}

/// Incrementally maintained exact sum of the retained (untrimmed) ranks.
#[derive(Debug, Clone)]
struct TrimTracker {
    alpha: f64,
    /// Retained ranks `lo..=hi`, 1-based; empty while `hi < lo`.
    lo: usize,
    hi: usize,
    sum: ExactSum,
}

impl TrimTracker {
    fn new(alpha: f64) -> Self {
        TrimTracker {
            alpha,
            lo: 1,
            hi: 0,
            sum: ExactSum::new(),
        }
    }

    /// Must run against the tree *before* `x` is inserted into it.
    fn before_insert(&mut self, tree: &OrderStatTree, x: f64) {
        let n = tree.len();
        let k = trim_count(self.alpha, n + 1);
        let (a, b) = (k + 1, n + 1 - k);
        let r = tree.rank_le(x) + 1;
        // Map the new retained window back onto the old ranks.
        let (lo, hi, with_x) = if r < a {
            (a - 1, b - 1, false)
        } else if r > b {
            (a, b, false)
        } else {
            (a, b - 1, true)
        };
        let at = |rank: usize| tree.select(rank).expect("rank within old tree");
        if lo < self.lo {
            self.sum.add(at(lo));
        } else if lo > self.lo {
            self.sum.sub(at(self.lo));
        }
        if hi > self.hi {
            self.sum.add(at(hi));
        } else if hi < self.hi {
            self.sum.sub(at(self.hi));
        }
        if with_x {
            self.sum.add(x);
        }
        self.lo = a;
        self.hi = b;
    }

    fn value(&self) -> Option<f64> {
        (self.hi >= self.lo).then(|| self.sum.value() / (self.hi - self.lo + 1) as f64)
    }
}

/// All rewards observed from one arm.
#[derive(Debug, Clone, Default)]
pub struct ArmStats {
    tree: OrderStatTree,
    total: ExactSum,
    trim: Option<TrimTracker>,
}

impl ArmStats {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stats that additionally keep an `O(log n)` α-trimmed mean for one fixed `alpha`.
    pub fn with_tracked_trim(alpha: f64) -> Result<Self, EstimatorError> {
        check_trim_alpha(alpha)?;
        Ok(ArmStats {
            trim: Some(TrimTracker::new(alpha)),
            ..Self::default()
        })
    }

    pub fn insert(&mut self, x: f64) -> Result<(), EstimatorError> {
        if !x.is_finite() {
            return Err(EstimatorError::NonFinite(x));
        }
        if let Some(t) = self.trim.as_mut() {
            t.before_insert(&self.tree, x);
        }
        self.tree.insert(x);
        self.total.add(x);
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.tree.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    /// `k`-th smallest sample, 1-based.
    pub fn order_statistic(&self, k: usize) -> Option<f64> {
        self.tree.select(k)
    }

    /// Samples in ascending order.
    pub fn sorted(&self) -> impl Iterator<Item = f64> + '_ {
        self.tree.iter()
    }

    pub fn quantile(&self, p: f64) -> Result<f64, EstimatorError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(EstimatorError::InvalidParameter(format!(
                "quantile level {p} outside (0, 1)"
            )));
        }
        if self.is_empty() {
            return Err(EstimatorError::Empty);
        }
        Ok(self
            .tree
            .select(quantile_rank(p, self.len()))
            .expect("rank in range"))
    }

    /// Lower median.
    pub fn median(&self) -> Result<f64, EstimatorError> {
        self.quantile(0.5)
    }

    /// Correctly rounded sample mean.
    pub fn mean(&self) -> Result<f64, EstimatorError> {
        if self.is_empty() {
            return Err(EstimatorError::Empty);
        }
        Ok(self.total.value() / self.len() as f64)
    }

    /// Mean of the samples ranked `⌊αn⌋+1 ..= n-⌊αn⌋`.
    ///
    /// Uses the incremental tracker when `alpha` matches the tracked one,
    /// otherwise walks the sorted samples. Both paths sum exactly, so they
    /// agree bit for bit.
    pub fn trimmed_mean(&self, alpha: f64) -> Result<f64, EstimatorError> {
        check_trim_alpha(alpha)?;
        if self.is_empty() {
            return Err(EstimatorError::Empty);
        }
        if let Some(t) = self.trim.as_ref().filter(|t| t.alpha == alpha) {
            return t.value().map_or_else(|| self.median(), Ok);
        }
        let n = self.len();
        let k = trim_count(alpha, n);
        if 2 * k >= n {
            return self.median();
        }
        let kept = n - 2 * k;
        let sum: ExactSum = self.tree.iter().skip(k).take(kept).collect();
        Ok(sum.value() / kept as f64)
    }

    /// Catoni M-estimate with scale `alpha_c`, see [`catoni_root`].
    pub fn catoni_estimate(&self, alpha_c: f64, tol: f64) -> Result<f64, EstimatorError> {
        if self.is_empty() {
            return Err(EstimatorError::Empty);
        }
        let lo = self.tree.min().expect("non-empty");
        let hi = self.tree.max().expect("non-empty");
        catoni_root_in(|theta| self.tree.iter().map(|x| catoni_psi(alpha_c * (x - theta))).sum(), lo, hi, alpha_c, tol)
    }
}

/// Catoni's influence function: `log(1 + x + x²/2)` for `x >= 0`,
/// `-log(1 - x + x²/2)` otherwise.
#[inline]
pub fn catoni_psi(x: f64) -> f64 {
    if x >= 0.0 {
        (x + 0.5 * x * x).ln_1p()
    } else {
        -(-x + 0.5 * x * x).ln_1p()
    }
}

/// Root of `θ ↦ Σ ψ(α(xᵢ - θ))` by bisection on `[min - 1/α, max + 1/α]`.
pub fn catoni_root(samples: &[f64], alpha_c: f64, tol: f64) -> Result<f64, EstimatorError> {
    if samples.is_empty() {
        return Err(EstimatorError::Empty);
    }
    if let Some(&bad) = samples.iter().find(|x| !x.is_finite()) {
        return Err(EstimatorError::NonFinite(bad));
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    catoni_root_in(
        |theta| samples.iter().map(|&x| catoni_psi(alpha_c * (x - theta))).sum(),
        lo,
        hi,
        alpha_c,
        tol,
    )
}

const CATONI_MAX_ITER: usize = 10_000;

fn catoni_root_in<F: Fn(f64) -> f64>(
    objective: F,
    min: f64,
    max: f64,
    alpha_c: f64,
    tol: f64,
) -> Result<f64, EstimatorError> {
    if !(alpha_c > 0.0 && alpha_c.is_finite()) {
        return Err(EstimatorError::InvalidParameter(format!("catoni scale {alpha_c} must be positive")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(EstimatorError::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    if min == max {
        return Ok(min);
    }
    // objective is strictly decreasing: positive at lo, negative at hi
    let mut lo = min - 1.0 / alpha_c;
    let mut hi = max + 1.0 / alpha_c;
    for _ in 0..CATONI_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f = objective(mid);
        if f > 0.0 {
            lo = mid;
        } else if f < 0.0 {
            hi = mid;
        } else {
            return Ok(mid);
        }
    }
    Err(EstimatorError::NoConvergence(CATONI_MAX_ITER))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(xs: &[f64]) -> ArmStats {
        let mut s = ArmStats::new();
        for &x in xs {
            s.insert(x).unwrap();
        }
        s
    }

    #[test]
    fn insert_into_empty() {
        let s = stats(&[5.0]);
        assert_eq!(s.len(), 1);
        assert_eq!(s.order_statistic(1), Some(5.0));
    }

    #[test]
    fn rejects_non_finite() {
        let mut s = ArmStats::new();
        assert_eq!(s.insert(f64::NAN).unwrap_err().to_string(), "non-finite sample NaN");
        assert!(s.insert(f64::INFINITY).is_err());
        assert!(s.is_empty());
    }

    #[test]
    fn quantile_is_inf_quantile() {
        let s = stats(&[10.0, 20.0, 30.0, 40.0]);
        assert_eq!(s.quantile(0.25).unwrap(), 10.0);
        assert_eq!(stats(&[1.0, 2.0, 3.0, 4.0]).quantile(0.5).unwrap(), 2.0);
        assert_eq!(s.quantile(0.26).unwrap(), 20.0);
        assert_eq!(s.quantile(0.999).unwrap(), 40.0);
    }

    #[test]
    fn quantile_rank_exact_fractions() {
        // 0.3 * 10 rounds up to 3.0000000000000004
        assert_eq!(quantile_rank(0.3, 10), 3);
        assert_eq!(quantile_rank(0.5, 1), 1);
        assert_eq!(quantile_rank(1e-9, 5), 1);
    }

    #[test]
    fn quantile_errors() {
        assert_eq!(ArmStats::new().median(), Err(EstimatorError::Empty));
        assert!(matches!(stats(&[1.0]).quantile(0.0), Err(EstimatorError::InvalidParameter(_))));
        assert!(matches!(stats(&[1.0]).quantile(1.0), Err(EstimatorError::InvalidParameter(_))));
    }

    #[test]
    fn median_examples() {
        assert_eq!(stats(&[1.0, 2.0, 3.0]).median().unwrap(), 2.0);
        assert_eq!(stats(&[7.0]).median().unwrap(), 7.0);
        assert_eq!(stats(&[-1e9, 4.0, 5.0, 6.0, 1e9]).median().unwrap(), 5.0);
    }

    #[test]
    fn trimmed_mean_examples() {
        assert_eq!(stats(&[0.0, 1.0, 2.0, 100.0]).trimmed_mean(0.25).unwrap(), 1.5);
        let xs = [3.0, -2.5, 8.0, 0.25];
        assert_eq!(stats(&xs).trimmed_mean(0.0).unwrap(), 8.75 / 4.0);
        assert_eq!(stats(&[-1e6, 1.0, 2.0, 3.0, 1e6]).trimmed_mean(0.2).unwrap(), 2.0);
        assert!(matches!(stats(&xs).trimmed_mean(0.5), Err(EstimatorError::InvalidParameter(_))));
        assert_eq!(ArmStats::new().trimmed_mean(0.1), Err(EstimatorError::Empty));
    }

    #[test]
    fn tracked_trim_matches_walk() {
        let mut tracked = ArmStats::with_tracked_trim(0.3).unwrap();
        let mut plain = ArmStats::new();
        let mut x = 0.123_f64;
        for i in 0..500 {
            x = (x * 3.7 + 0.31).fract();
            let v = if i % 7 == 0 { 1e9 * (x - 0.5) } else { x * 10.0 - 3.0 };
            tracked.insert(v).unwrap();
            plain.insert(v).unwrap();
            assert_eq!(
                tracked.trimmed_mean(0.3).unwrap().to_bits(),
                plain.trimmed_mean(0.3).unwrap().to_bits(),
                "after {} inserts",
                i + 1
            );
        }
    }

    #[test]
    fn tracked_trim_zero_equals_mean() {
        let mut s = ArmStats::with_tracked_trim(0.0).unwrap();
        for v in [0.1, 0.7, -3.3, 1e-3, 12.5] {
            s.insert(v).unwrap();
            assert_eq!(s.trimmed_mean(0.0).unwrap().to_bits(), s.mean().unwrap().to_bits());
        }
    }

    #[test]
    fn catoni_examples() {
        for alpha in [0.01, 0.5, 3.0] {
            let v = stats(&[-1.0, 1.0]).catoni_estimate(alpha, 1e-12).unwrap();
            assert!(v.abs() < 1e-9, "alpha {alpha}: {v}");
        }
        assert_eq!(stats(&[4.25]).catoni_estimate(0.3, 1e-9).unwrap(), 4.25);
        assert!(matches!(stats(&[1.0]).catoni_estimate(0.0, 1e-9), Err(EstimatorError::InvalidParameter(_))));
    }

    #[test]
    fn catoni_psi_is_odd() {
        for x in [0.0, 0.3, 2.0, 1e4] {
            assert_eq!(catoni_psi(-x), -catoni_psi(x));
        }
    }

    #[test]
    fn catoni_slice_and_stats_agree() {
        let xs = [0.3, -1.2, 5.5, 2.25, 0.0, 1e6];
        let a = catoni_root(&xs, 0.2, 1e-10).unwrap();
        let b = stats(&xs).catoni_estimate(0.2, 1e-10).unwrap();
        assert!((a - b).abs() < 1e-9);
    }
}
