//! ε-greedy with a decaying exploration rate `min(1, cK/t)`.
//!
//! Every arm is first pulled `⌈c⌉` times in turn. Afterwards a uniformly
//! random arm is explored with probability `min(1, cK/t)`, otherwise the arm
//! with the largest location estimate (median, mean or trimmed mean) is
//! exploited.

use rand::Rng;

use super::{argmax, Policy};
use crate::estimators::{ArmStats, EstimatorError};
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreedyEstimator {
    Median,
    Mean,
    Trimmed { alpha_trim: f64 },
}

#[derive(Debug, Clone)]
pub struct GreedyPolicy {
    estimator: GreedyEstimator,
    c: f64,
    init_pulls: u64,
    stats: Vec<ArmStats>,
    estimates: Vec<f64>,
    pulls: Vec<u64>,
    rng: StreamRng,
}

/// Exploration probability at round `t`.
pub fn explore_probability(c: f64, arms: usize, t: u64) -> f64 {
    (c * arms as f64 / t as f64).min(1.0)
}

impl GreedyPolicy {
    pub fn new(arms: usize, c: f64, estimator: GreedyEstimator, rng: StreamRng) -> Result<Self, EstimatorError> {
        let stats = (0..arms)
            .map(|_| match estimator {
                GreedyEstimator::Trimmed { alpha_trim } => ArmStats::with_tracked_trim(alpha_trim),
                _ => Ok(ArmStats::new()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GreedyPolicy {
            estimator,
            c,
            init_pulls: c.ceil().max(1.0) as u64,
            stats,
            estimates: vec![0.0; arms],
            pulls: vec![0; arms],
            rng,
        })
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    /// Arm with the largest estimate, lowest index on ties.
    pub fn greedy_arm(&self) -> usize {
        argmax(&self.estimates)
    }
}

impl Policy for GreedyPolicy {
    fn select(&mut self, t: u64) -> usize {
        let arms = self.pulls.len();
        if t <= self.init_pulls * arms as u64 {
            return ((t - 1) / self.init_pulls) as usize;
        }
        if self.rng.random::<f64>() < explore_probability(self.c, arms, t) {
            self.rng.random_range(0..arms)
        } else {
            self.greedy_arm()
        }
    }

    fn observe(&mut self, arm: usize, reward: f64) {
        let s = &mut self.stats[arm];
        s.insert(reward).expect("environment rewards are finite");
        self.pulls[arm] += 1;
        self.estimates[arm] = match self.estimator {
            GreedyEstimator::Median => s.median(),
            GreedyEstimator::Mean => s.mean(),
            GreedyEstimator::Trimmed { alpha_trim } => s.trimmed_mean(alpha_trim),
        }
        .expect("non-empty");
    }

    fn pulls(&self) -> &[u64] {
        &self.pulls
    }
}
