//! Arm-selection algorithms.
//!
//! | tag                  | estimator      | exploration                                  |
//! |----------------------|----------------|----------------------------------------------|
//! | `med-e-ucb`          | median         | UCB bonus plus a forced block schedule       |
//! | `med-eps-greedy`     | median         | `min(1, cK/t)` uniform exploration           |
//! | `ucb`                | mean           | UCB bonus                                    |
//! | `eps-greedy`         | mean           | `min(1, cK/t)` uniform exploration           |
//! | `exp3`               | -              | exponential weights                          |
//! | `rucb-mab`           | median         | UCB bonus, one initial pull per arm          |
//! | `catoni-ucb`         | Catoni         | UCB bonus                                    |
//! | `trimmed-ucb`        | trimmed mean   | UCB bonus                                    |
//! | `trimmed-eps-greedy` | trimmed mean   | `min(1, cK/t)` uniform exploration           |

mod exp3;
mod greedy;
mod index;
pub mod schedule;

pub use exp3::{auto_gamma, Exp3};
pub use greedy::{explore_probability, GreedyEstimator, GreedyPolicy};
pub use index::{BlockSchedule, IndexKind, IndexPolicy};
pub use schedule::{forced_pulls, group_is_feasible, min_feasible_group, phase as med_e_ucb_phase, Phase};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::Scenario;
use crate::rng::{self, StreamRole};

/// A bandit algorithm. Rounds `t` are 1-based, arms 0-based.
pub trait Policy: Send {
    fn select(&mut self, t: u64) -> usize;
    /// Feed back the (possibly attacked) reward of the arm just pulled.
    fn observe(&mut self, arm: usize, reward: f64);
    /// Pull counts `T_j(t)`.
    fn pulls(&self) -> &[u64];
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn select(&mut self, t: u64) -> usize {
        (**self).select(t)
    }
    fn observe(&mut self, arm: usize, reward: f64) {
        (**self).observe(arm, reward)
    }
    fn pulls(&self) -> &[u64] {
        (**self).pulls()
    }
}

/// Index of the maximum, lowest index on ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{policy}: {message}")]
pub struct PolicyError {
    pub policy: &'static str,
    pub message: String,
}

fn d_b() -> f64 {
    4.0
}
fn d_omega() -> f64 {
    4.0
}
fn d_group() -> u64 {
    1000
}
fn d_c() -> f64 {
    10.0
}
fn d_ucb_alpha() -> f64 {
    8.0
}
fn d_trim() -> f64 {
    0.125
}
fn d_variance() -> f64 {
    1.0
}
fn d_exponent() -> f64 {
    4.0
}

/// Algorithm plus parameters, as written in a scenario config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicyConfig {
    MedEUcb {
        #[serde(default = "d_b")]
        b: f64,
        #[serde(default = "d_omega")]
        omega: f64,
        #[serde(default = "d_group")]
        group_size: u64,
    },
    MedEpsGreedy {
        #[serde(default = "d_c")]
        c: f64,
    },
    Ucb {
        #[serde(default = "d_ucb_alpha")]
        alpha: f64,
    },
    EpsGreedy {
        #[serde(default = "d_c")]
        c: f64,
    },
    Exp3 {
        /// `None` selects `min{1, sqrt(K ln K / ((e-1)T))}`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        /// `None` clips to `[min mean - 5σ, max mean + 5σ]`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        clip: Option<(f64, f64)>,
    },
    RucbMab {
        #[serde(default = "d_omega")]
        omega: f64,
    },
    CatoniUcb {
        #[serde(default = "d_variance")]
        variance: f64,
        #[serde(default = "d_exponent")]
        confidence_exponent: f64,
    },
    TrimmedUcb {
        #[serde(default = "d_trim")]
        alpha_trim: f64,
        #[serde(default = "d_ucb_alpha")]
        alpha: f64,
    },
    TrimmedEpsGreedy {
        #[serde(default = "d_trim")]
        alpha_trim: f64,
        #[serde(default = "d_c")]
        c: f64,
    },
}

pub const ALL_TAGS: [&str; 9] = [
    "med-e-ucb",
    "med-eps-greedy",
    "ucb",
    "eps-greedy",
    "exp3",
    "rucb-mab",
    "catoni-ucb",
    "trimmed-ucb",
    "trimmed-eps-greedy",
];

impl PolicyConfig {
    /// Default parameters for a tag.
    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "med-e-ucb" => PolicyConfig::MedEUcb {
                b: d_b(),
                omega: d_omega(),
                group_size: d_group(),
            },
            "med-eps-greedy" => PolicyConfig::MedEpsGreedy { c: d_c() },
            "ucb" => PolicyConfig::Ucb { alpha: d_ucb_alpha() },
            "eps-greedy" => PolicyConfig::EpsGreedy { c: d_c() },
            "exp3" => PolicyConfig::Exp3 { gamma: None, clip: None },
            "rucb-mab" => PolicyConfig::RucbMab { omega: d_omega() },
            "catoni-ucb" => PolicyConfig::CatoniUcb {
                variance: d_variance(),
                confidence_exponent: d_exponent(),
            },
            "trimmed-ucb" => PolicyConfig::TrimmedUcb {
                alpha_trim: d_trim(),
                alpha: d_ucb_alpha(),
            },
            "trimmed-eps-greedy" => PolicyConfig::TrimmedEpsGreedy {
                alpha_trim: d_trim(),
                c: d_c(),
            },
            _ => return None,
        })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            PolicyConfig::MedEUcb { .. } => "med-e-ucb",
            PolicyConfig::MedEpsGreedy { .. } => "med-eps-greedy",
            PolicyConfig::Ucb { .. } => "ucb",
            PolicyConfig::EpsGreedy { .. } => "eps-greedy",
            PolicyConfig::Exp3 { .. } => "exp3",
            PolicyConfig::RucbMab { .. } => "rucb-mab",
            PolicyConfig::CatoniUcb { .. } => "catoni-ucb",
            PolicyConfig::TrimmedUcb { .. } => "trimmed-ucb",
            PolicyConfig::TrimmedEpsGreedy { .. } => "trimmed-eps-greedy",
        }
    }

    pub fn validate(&self, arms: usize) -> Result<(), PolicyError> {
        let tag = self.tag();
        let err = |message: String| Err(PolicyError { policy: tag, message });
        let positive = |name: &str, v: f64| -> Result<(), PolicyError> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(PolicyError {
                    policy: tag,
                    message: format!("{name} = {v} must be positive"),
                })
            }
        };
        let trim = |a: f64| -> Result<(), PolicyError> {
            if (0.0..0.5).contains(&a) {
                Ok(())
            } else {
                Err(PolicyError {
                    policy: tag,
                    message: format!("alpha_trim = {a} outside [0, 0.5)"),
                })
            }
        };
        match *self {
            PolicyConfig::MedEUcb { b, omega, group_size } => {
                positive("b", b)?;
                positive("omega", omega)?;
                if !schedule::group_is_feasible(arms, group_size, b) {
                    return err(format!(
                        "group size {group_size} infeasible: need G >= K*ceil(b ln G) = {} with K = {arms}, b = {b}",
                        arms as u64 * schedule::forced_pulls(b, group_size)
                    ));
                }
            }
            PolicyConfig::MedEpsGreedy { c } | PolicyConfig::EpsGreedy { c } => positive("c", c)?,
            PolicyConfig::Ucb { alpha } => positive("alpha", alpha)?,
            PolicyConfig::Exp3 { gamma, clip } => {
                if let Some(g) = gamma {
                    if !(g > 0.0 && g <= 1.0) {
                        return err(format!("gamma = {g} outside (0, 1]"));
                    }
                }
                if let Some((lo, hi)) = clip {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return err(format!("clip range [{lo}, {hi}] is empty"));
                    }
                }
            }
            PolicyConfig::RucbMab { omega } => positive("omega", omega)?,
            PolicyConfig::CatoniUcb {
                variance,
                confidence_exponent,
            } => {
                positive("variance", variance)?;
                positive("confidence_exponent", confidence_exponent)?;
            }
            PolicyConfig::TrimmedUcb { alpha_trim, alpha } => {
                trim(alpha_trim)?;
                positive("alpha", alpha)?;
            }
            PolicyConfig::TrimmedEpsGreedy { alpha_trim, c } => {
                trim(alpha_trim)?;
                positive("c", c)?;
            }
        }
        Ok(())
    }

    /// Instantiate for `scenario`. Randomised policies draw from the policy
    /// stream split from `seed`.
    pub fn build(&self, scenario: &Scenario, seed: u64) -> Result<Box<dyn Policy>, PolicyError> {
        let k = scenario.num_arms();
        self.validate(k)?;
        let rng = rng::stream(seed, 0, StreamRole::Policy);
        let wrap = |e: crate::estimators::EstimatorError| PolicyError {
            policy: self.tag(),
            message: e.to_string(),
        };
        Ok(match *self {
            PolicyConfig::MedEUcb { b, omega, group_size } => Box::new(
                IndexPolicy::new(k, IndexKind::Median { omega }, Some(BlockSchedule { b, group: group_size }))
                    .map_err(wrap)?,
            ),
            PolicyConfig::RucbMab { omega } => {
                Box::new(IndexPolicy::new(k, IndexKind::Median { omega }, None).map_err(wrap)?)
            }
            PolicyConfig::Ucb { alpha } => Box::new(IndexPolicy::new(k, IndexKind::Mean { alpha }, None).map_err(wrap)?),
            PolicyConfig::TrimmedUcb { alpha_trim, alpha } => {
                Box::new(IndexPolicy::new(k, IndexKind::Trimmed { alpha_trim, alpha }, None).map_err(wrap)?)
            }
            PolicyConfig::CatoniUcb {
                variance,
                confidence_exponent,
            } => Box::new(
                IndexPolicy::new(
                    k,
                    IndexKind::Catoni {
                        variance,
                        exponent: confidence_exponent,
                    },
                    None,
                )
                .map_err(wrap)?,
            ),
            PolicyConfig::MedEpsGreedy { c } => {
                Box::new(GreedyPolicy::new(k, c, GreedyEstimator::Median, rng).map_err(wrap)?)
            }
            PolicyConfig::EpsGreedy { c } => Box::new(GreedyPolicy::new(k, c, GreedyEstimator::Mean, rng).map_err(wrap)?),
            PolicyConfig::TrimmedEpsGreedy { alpha_trim, c } => {
                Box::new(GreedyPolicy::new(k, c, GreedyEstimator::Trimmed { alpha_trim }, rng).map_err(wrap)?)
            }
            PolicyConfig::Exp3 { gamma, clip } => {
                let gamma = gamma.unwrap_or_else(|| auto_gamma(k, scenario.horizon()));
                let clip = clip.unwrap_or_else(|| default_clip(scenario));
                Box::new(Exp3::new(k, gamma, clip, rng))
            }
        })
    }
}

/// `[min mean - 5σ, max mean + 5σ]` over the scenario's arms.
pub fn default_clip(scenario: &Scenario) -> (f64, f64) {
    let arms = scenario.arms();
    let lo = arms.iter().map(|a| a.mean() - 5.0 * a.scale()).fold(f64::INFINITY, f64::min);
    let hi = arms.iter().map(|a| a.mean() + 5.0 * a.scale()).fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Trim fraction paired with an attack probability: the smallest of
/// {0.125, 0.3} that covers `rho`.
pub fn trim_for_rho(rho: f64) -> f64 {
    if rho <= 0.125 {
        0.125
    } else {
        0.3
    }
}
