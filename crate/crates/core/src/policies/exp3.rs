//! EXP3 with clipped, rescaled rewards.

use rand::Rng;

use super::Policy;
use crate::rng::StreamRng;

/// Weights are divided by their maximum once it passes this.
const RENORMALIZE_ABOVE: f64 = 1e200;

/// `min{1, sqrt(K ln K / ((e - 1) T))}`.
pub fn auto_gamma(arms: usize, horizon: u64) -> f64 {
    let k = arms as f64;
    (k * k.ln() / ((std::f64::consts::E - 1.0) * horizon as f64)).sqrt().min(1.0)
}

#[derive(Debug, Clone)]
pub struct Exp3 {
    gamma: f64,
    clip: (f64, f64),
    weights: Vec<f64>,
    probs: Vec<f64>,
    pulls: Vec<u64>,
    rng: StreamRng,
}

impl Exp3 {
    pub fn new(arms: usize, gamma: f64, clip: (f64, f64), rng: StreamRng) -> Self {
        let mut p = Exp3 {
            gamma,
            clip,
            weights: vec![1.0; arms],
            probs: vec![1.0 / arms as f64; arms],
            pulls: vec![0; arms],
            rng,
        };
        p.update_probs();
        p
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn update_probs(&mut self) {
        let k = self.weights.len() as f64;
        let total: f64 = self.weights.iter().sum();
        for (p, w) in self.probs.iter_mut().zip(&self.weights) {
            *p = (1.0 - self.gamma) * w / total + self.gamma / k;
        }
    }

    /// Observed reward clipped to the configured range and mapped to `[0, 1]`.
    pub fn rescale(&self, reward: f64) -> f64 {
        let (lo, hi) = self.clip;
        (reward.clamp(lo, hi) - lo) / (hi - lo)
    }
}

impl Policy for Exp3 {
    fn select(&mut self, _t: u64) -> usize {
        let u: f64 = self.rng.random();
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }

    fn observe(&mut self, arm: usize, reward: f64) {
        self.pulls[arm] += 1;
        let k = self.weights.len() as f64;
        let estimate = self.rescale(reward) / self.probs[arm];
        self.weights[arm] *= (self.gamma * estimate / k).exp();
        let max = self.weights.iter().copied().fold(0.0, f64::max);
        if max > RENORMALIZE_ABOVE || !max.is_finite() {
            let max = if max.is_finite() { max } else { f64::MAX };
            for w in &mut self.weights {
                *w = (*w / max).max(f64::MIN_POSITIVE);
            }
        }
        self.update_probs();
    }

    fn pulls(&self) -> &[u64] {
        &self.pulls
    }
}
