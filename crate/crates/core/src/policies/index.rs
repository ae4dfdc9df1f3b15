//! Index policies: pick `argmax_j estimate_j + bonus_j(t)`.
//!
//! One engine covers vanilla UCB, trimmed-mean UCB, the median UCB of
//! RUCB-MAB, Catoni UCB, and (with a forced exploration schedule attached)
//! the exploration-aided median UCB.

use super::schedule::{self, Phase};
use super::{argmax, Policy};
use crate::estimators::{ArmStats, EstimatorError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndexKind {
    /// mean + sqrt(α ln t / (2n))
    Mean { alpha: f64 },
    /// trimmed mean + sqrt(α ln t / (2n))
    Trimmed { alpha_trim: f64, alpha: f64 },
    /// median + sqrt(ω ln t / n)
    Median { omega: f64 },
    /// Catoni estimate + sqrt(2 v e ln t / n), scale sqrt(2 e ln t / (n v))
    Catoni { variance: f64, exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSchedule {
    pub b: f64,
    pub group: u64,
}

const CATONI_TOL: f64 = 1e-6;
const CATONI_ALWAYS_REFRESH: usize = 32;
const CATONI_REFRESH_RATIO: f64 = 1.1;

#[derive(Debug, Clone, Copy, Default)]
struct Refresh {
    n: usize,
    log_t: f64,
}

#[derive(Debug, Clone)]
pub struct IndexPolicy {
    kind: IndexKind,
    schedule: Option<BlockSchedule>,
    stats: Vec<ArmStats>,
    estimates: Vec<f64>,
    refreshed: Vec<Refresh>,
    pulls: Vec<u64>,
    rounds: u64,
    scratch: Vec<f64>,
    index_buf: Vec<f64>,
}

impl IndexPolicy {
    pub fn new(arms: usize, kind: IndexKind, schedule: Option<BlockSchedule>) -> Result<Self, EstimatorError> {
        let stats = (0..arms)
            .map(|_| match kind {
                IndexKind::Trimmed { alpha_trim, .. } => ArmStats::with_tracked_trim(alpha_trim),
                _ => Ok(ArmStats::new()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IndexPolicy {
            kind,
            schedule,
            stats,
            estimates: vec![0.0; arms],
            refreshed: vec![Refresh::default(); arms],
            pulls: vec![0; arms],
            rounds: 0,
            scratch: Vec::new(),
            index_buf: vec![0.0; arms],
        })
    }

    pub fn stats(&self) -> &[ArmStats] {
        &self.stats
    }

    /// Cached per-arm location estimates.
    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    fn bonus(&self, log_t: f64, n: u64) -> f64 {
        let n = n as f64;
        match self.kind {
            IndexKind::Mean { alpha } | IndexKind::Trimmed { alpha, .. } => (alpha * log_t / (2.0 * n)).sqrt(),
            IndexKind::Median { omega } => (omega * log_t / n).sqrt(),
            IndexKind::Catoni { variance, exponent } => (2.0 * variance * exponent * log_t / n).sqrt(),
        }
    }

    fn refresh_catoni(&mut self, arm: usize, variance: f64, exponent: f64) {
        let n = self.stats[arm].len();
        let log_t = (self.rounds.max(2) as f64).ln();
        let last = self.refreshed[arm];
        let stale = n <= CATONI_ALWAYS_REFRESH
            || n as f64 >= last.n as f64 * CATONI_REFRESH_RATIO
            || log_t >= last.log_t * CATONI_REFRESH_RATIO;
        if !stale {
            return;
        }
        let scale = (2.0 * exponent * log_t / (n as f64 * variance)).sqrt();
        self.scratch.clear();
        self.scratch.extend(self.stats[arm].sorted());
        self.estimates[arm] = crate::estimators::catoni_root(&self.scratch, scale, CATONI_TOL)
            .expect("finite samples, positive scale");
        self.refreshed[arm] = Refresh { n, log_t };
    }
}

impl Policy for IndexPolicy {
    fn select(&mut self, t: u64) -> usize {
        if let Some(s) = self.schedule {
            match schedule::phase(t, self.pulls.len(), s.group, s.b) {
                Phase::Init(arm) | Phase::Explore(arm) => return arm,
                Phase::UcbRound => {}
            }
        }
        if let Some(arm) = self.pulls.iter().position(|&n| n == 0) {
            return arm;
        }
        let log_t = (t as f64).ln();
        for j in 0..self.pulls.len() {
            self.index_buf[j] = self.estimates[j] + self.bonus(log_t, self.pulls[j]);
        }
        argmax(&self.index_buf)
    }

    fn observe(&mut self, arm: usize, reward: f64) {
        self.stats[arm].insert(reward).expect("environment rewards are finite");
        self.pulls[arm] += 1;
        self.rounds += 1;
        let s = &self.stats[arm];
        match self.kind {
            IndexKind::Mean { .. } => self.estimates[arm] = s.mean().expect("non-empty"),
            IndexKind::Trimmed { alpha_trim, .. } => {
                self.estimates[arm] = s.trimmed_mean(alpha_trim).expect("non-empty")
            }
            IndexKind::Median { .. } => self.estimates[arm] = s.median().expect("non-empty"),
            IndexKind::Catoni { variance, exponent } => self.refresh_catoni(arm, variance, exponent),
        }
    }

    fn pulls(&self) -> &[u64] {
        &self.pulls
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feed(p: &mut IndexPolicy, arm: usize, xs: &[f64]) {
        for &x in xs {
            p.observe(arm, x);
        }
    }

    #[test]
    fn median_index_arithmetic() {
        // med = (5, 5), T = (4, 1), ln t = 1, ω = 4: indices (6, 7)
        let mut p = IndexPolicy::new(2, IndexKind::Median { omega: 4.0 }, None).unwrap();
        feed(&mut p, 0, &[5.0, 5.0, 5.0, 5.0]);
        feed(&mut p, 1, &[5.0]);
        assert_eq!(p.bonus(1.0, 4), 1.0);
        assert_eq!(p.bonus(1.0, 1), 2.0);
        // t = 3 gives ln t ≈ 1.0986; arm 1 still has the larger index
        assert_eq!(p.select(3), 1);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let mut p = IndexPolicy::new(3, IndexKind::Median { omega: 4.0 }, None).unwrap();
        for arm in 0..3 {
            feed(&mut p, arm, &[1.0, 2.0]);
        }
        assert_eq!(p.select(7), 0);
    }

    #[test]
    fn unpulled_arms_first() {
        let mut p = IndexPolicy::new(3, IndexKind::Mean { alpha: 8.0 }, None).unwrap();
        assert_eq!(p.select(1), 0);
        p.observe(0, 1.0);
        assert_eq!(p.select(2), 1);
    }

    #[test]
    fn schedule_overrides_index() {
        let s = BlockSchedule { b: 4.0, group: 1000 };
        let mut p = IndexPolicy::new(10, IndexKind::Median { omega: 4.0 }, Some(s)).unwrap();
        assert_eq!(p.select(29), 1);
        assert_eq!(p.select(1004), 1);
    }

    #[test]
    fn catoni_tracks_centre() {
        let mut p = IndexPolicy::new(2, IndexKind::Catoni { variance: 1.0, exponent: 4.0 }, None).unwrap();
        feed(&mut p, 0, &[1.0, 3.0, 2.0]);
        assert!((p.estimates()[0] - 2.0).abs() < 1e-5);
    }
}
