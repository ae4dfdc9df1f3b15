//! Stochastic arms and the probabilistic, unbounded reward attack.
//!
//! Each round the environment draws a clean reward from the pulled arm and,
//! independently with probability `rho`, lets the adversary add an arbitrary
//! `η` to it. The adversary sees which arm was pulled before choosing `η`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normal;
use crate::rng::{self, StreamRng, StreamRole};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("arm index {arm} out of range for {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },
    #[error("horizon of {horizon} rounds exhausted")]
    HorizonExhausted { horizon: u64 },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

/// Reward distribution of one arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ArmSpec {
    Gaussian { mean: f64, sigma: f64 },
    /// Piecewise-linear CDF through `(x, F(x))` knots; must start at
    /// `F = 0` and end at `F = 1`.
    CdfTable { points: Vec<(f64, f64)> },
}

impl ArmSpec {
    pub fn gaussian(mean: f64, sigma: f64) -> Self {
        ArmSpec::Gaussian { mean, sigma }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        match self {
            ArmSpec::Gaussian { mean, sigma } => {
                if !mean.is_finite() {
                    return Err(EnvError::InvalidScenario(format!("arm mean {mean} is not finite")));
                }
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(EnvError::InvalidScenario(format!("gaussian sigma {sigma} must be positive")));
                }
            }
            ArmSpec::CdfTable { points } => {
                if points.len() < 2 {
                    return Err(EnvError::InvalidScenario("cdf table needs at least two knots".into()));
                }
                if points.iter().any(|(x, p)| !x.is_finite() || !p.is_finite()) {
                    return Err(EnvError::InvalidScenario("cdf table knots must be finite".into()));
                }
                if points[0].1 != 0.0 || points[points.len() - 1].1 != 1.0 {
                    return Err(EnvError::InvalidScenario("cdf table must run from 0 to 1".into()));
                }
                for w in points.windows(2) {
                    if w[1].0 <= w[0].0 || w[1].1 < w[0].1 {
                        return Err(EnvError::InvalidScenario(
                            "cdf table x must increase and F must not decrease".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match self {
            ArmSpec::Gaussian { mean, .. } => *mean,
            // uniform mass inside each segment
            ArmSpec::CdfTable { points } => points
                .windows(2)
                .map(|w| (w[1].1 - w[0].1) * 0.5 * (w[0].0 + w[1].0))
                .sum(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            ArmSpec::Gaussian { mean, sigma } => normal::cdf((x - mean) / sigma),
            ArmSpec::CdfTable { points } => {
                if x <= points[0].0 {
                    return 0.0;
                }
                for w in points.windows(2) {
                    let ((x0, p0), (x1, p1)) = (w[0], w[1]);
                    if x <= x1 {
                        return p0 + (p1 - p0) * (x - x0) / (x1 - x0);
                    }
                }
                1.0
            }
        }
    }

    /// Generalized quantile `inf{x : F(x) >= p}` for `p` in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            ArmSpec::Gaussian { mean, sigma } => mean + sigma * normal::quantile(p),
            ArmSpec::CdfTable { points } => {
                for w in points.windows(2) {
                    let ((x0, p0), (x1, p1)) = (w[0], w[1]);
                    if p1 >= p && p1 > p0 {
                        return x0 + (x1 - x0) * ((p - p0) / (p1 - p0)).max(0.0);
                    }
                }
                points[points.len() - 1].0
            }
        }
    }

    /// Largest single-draw spread used for default reward clipping.
    pub fn scale(&self) -> f64 {
        match self {
            ArmSpec::Gaussian { sigma, .. } => *sigma,
            ArmSpec::CdfTable { points } => 0.0_f64.max((points[points.len() - 1].0 - points[0].0) / 10.0),
        }
    }
}

/// How the adversary picks `η` once it has decided to attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum AttackStrategy {
    None,
    /// `η ~ U(0, magnitude)`, subtracted on the optimal arm, added elsewhere.
    TargetedUniform { magnitude: f64 },
    /// `η = -offset` on the optimal arm, `0` elsewhere.
    ConstantOffset { offset: f64 },
    /// `η = -magnitude` on the optimal arm, `0` elsewhere.
    MedianKiller {
        #[serde(default = "default_killer_magnitude")]
        magnitude: f64,
    },
}

pub const DEFAULT_KILLER_MAGNITUDE: f64 = 1e9;

fn default_killer_magnitude() -> f64 {
    DEFAULT_KILLER_MAGNITUDE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub rho: f64,
    #[serde(flatten)]
    pub strategy: AttackStrategy,
}

impl AttackSpec {
    pub fn none() -> Self {
        AttackSpec {
            rho: 0.0,
            strategy: AttackStrategy::None,
        }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        if !(0.0..1.0).contains(&self.rho) {
            return Err(EnvError::InvalidScenario(format!("attack probability {} outside [0, 1)", self.rho)));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(EnvError::InvalidScenario(format!("attack {name} {v} must be positive")))
            }
        };
        match self.strategy {
            AttackStrategy::None => Ok(()),
            AttackStrategy::TargetedUniform { magnitude } => positive("magnitude", magnitude),
            AttackStrategy::ConstantOffset { offset } => positive("offset", offset),
            AttackStrategy::MedianKiller { magnitude } => positive("magnitude", magnitude),
        }
    }

    /// One attack decision: `(observed, attacked)`.
    pub fn apply<R: Rng + ?Sized>(&self, pulled_is_optimal: bool, clean: f64, rng: &mut R) -> (f64, bool) {
        let attacked = rng.random::<f64>() < self.rho;
        if !attacked {
            return (clean, false);
        }
        let eta = match self.strategy {
            AttackStrategy::None => 0.0,
            AttackStrategy::TargetedUniform { magnitude } => {
                let eta = rng.random::<f64>() * magnitude;
                if pulled_is_optimal {
                    -eta
                } else {
                    eta
                }
            }
            AttackStrategy::ConstantOffset { offset: m } | AttackStrategy::MedianKiller { magnitude: m } => {
                if pulled_is_optimal {
                    -m
                } else {
                    0.0
                }
            }
        };
        (clean + eta, true)
    }
}

/// A complete bandit instance: arms, adversary and horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioSpec", into = "ScenarioSpec")]
pub struct Scenario {
    arms: Vec<ArmSpec>,
    attack: AttackSpec,
    horizon: u64,
    means: Vec<f64>,
    optimal: usize,
    gaps: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioSpec {
    arms: Vec<ArmSpec>,
    attack: AttackSpec,
    horizon: u64,
}

impl TryFrom<ScenarioSpec> for Scenario {
    type Error = EnvError;

    fn try_from(s: ScenarioSpec) -> Result<Self, EnvError> {
        Scenario::new(s.arms, s.attack, s.horizon)
    }
}

impl From<Scenario> for ScenarioSpec {
    fn from(s: Scenario) -> Self {
        ScenarioSpec {
            arms: s.arms,
            attack: s.attack,
            horizon: s.horizon,
        }
    }
}

impl Scenario {
    pub fn new(arms: Vec<ArmSpec>, attack: AttackSpec, horizon: u64) -> Result<Self, EnvError> {
        if arms.is_empty() {
            return Err(EnvError::InvalidScenario("need at least one arm".into()));
        }
        for a in &arms {
            a.validate()?;
        }
        attack.validate()?;
        if horizon < arms.len() as u64 {
            return Err(EnvError::InvalidScenario(format!(
                "horizon {horizon} shorter than the number of arms {}",
                arms.len()
            )));
        }
        let means: Vec<f64> = arms.iter().map(ArmSpec::mean).collect();
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<usize> = (0..means.len()).filter(|&i| means[i] == best).collect();
        if winners.len() != 1 {
            return Err(EnvError::InvalidScenario(format!(
                "optimal arm must be unique, arms {winners:?} share mean {best}"
            )));
        }
        let gaps = means.iter().map(|m| best - m).collect();
        Ok(Scenario {
            arms,
            attack,
            horizon,
            means,
            optimal: winners[0],
            gaps,
        })
    }

    pub fn arms(&self) -> &[ArmSpec] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn attack(&self) -> &AttackSpec {
        &self.attack
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// 0-based index of the optimal arm.
    pub fn optimal_arm(&self) -> usize {
        self.optimal
    }

    pub fn best_mean(&self) -> f64 {
        self.means[self.optimal]
    }

    /// `Δ_j = μ* - μ_j`; zero for the optimal arm.
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn min_gap(&self) -> f64 {
        self.gaps
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.optimal)
            .map(|(_, &g)| g)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }

    /// Common σ when every arm is Gaussian with the same spread.
    pub fn shared_sigma(&self) -> Option<f64> {
        let mut sigma = None;
        for a in &self.arms {
            match (a, sigma) {
                (ArmSpec::Gaussian { sigma: s, .. }, None) => sigma = Some(*s),
                (ArmSpec::Gaussian { sigma: s, .. }, Some(prev)) if *s == prev => {}
                _ => return None,
            }
        }
        sigma
    }

    pub fn with_attack(mut self, attack: AttackSpec) -> Result<Self, EnvError> {
        attack.validate()?;
        self.attack = attack;
        Ok(self)
    }

    pub fn with_horizon(self, horizon: u64) -> Result<Self, EnvError> {
        Scenario::new(self.arms, self.attack, horizon)
    }
}

/// One round of interaction as the harness sees it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub round: u64,
    pub arm: usize,
    pub clean_reward: f64,
    pub attacked: bool,
    pub observed_reward: f64,
}

enum Sampler {
    Gaussian(Normal<f64>),
    Table,
}

/// Draw a clean reward from `arm`.
pub fn sample_clean<R: Rng + ?Sized>(arm: &ArmSpec, rng: &mut R) -> f64 {
    match arm {
        ArmSpec::Gaussian { mean, sigma } => Normal::new(*mean, *sigma).expect("validated sigma").sample(rng),
        ArmSpec::CdfTable { .. } => arm.quantile(rng.random::<f64>().max(f64::MIN_POSITIVE)),
    }
}

/// A single-owner run of a [`Scenario`] with its own random streams.
pub struct Environment<'a> {
    scenario: &'a Scenario,
    samplers: Vec<Sampler>,
    round: u64,
    reward_rng: StreamRng,
    attack_rng: StreamRng,
}

impl<'a> Environment<'a> {
    /// Reward and attack streams are split from `seed` by role.
    pub fn new(scenario: &'a Scenario, seed: u64) -> Self {
        let samplers = scenario
            .arms
            .iter()
            .map(|a| match a {
                ArmSpec::Gaussian { mean, sigma } => Sampler::Gaussian(Normal::new(*mean, *sigma).expect("validated sigma")),
                ArmSpec::CdfTable { .. } => Sampler::Table,
            })
            .collect();
        Environment {
            scenario,
            samplers,
            round: 0,
            reward_rng: rng::stream(seed, 0, StreamRole::CleanReward),
            attack_rng: rng::stream(seed, 0, StreamRole::Attack),
        }
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn step(&mut self, arm: usize) -> Result<Observation, EnvError> {
        let k = self.scenario.num_arms();
        if arm >= k {
            return Err(EnvError::ArmOutOfRange { arm, arms: k });
        }
        if self.round >= self.scenario.horizon {
            return Err(EnvError::HorizonExhausted {
                horizon: self.scenario.horizon,
            });
        }
        self.round += 1;
        let clean = match &self.samplers[arm] {
            Sampler::Gaussian(n) => n.sample(&mut self.reward_rng),
            Sampler::Table => sample_clean(&self.scenario.arms[arm], &mut self.reward_rng),
        };
        let (observed, attacked) =
            self.scenario
                .attack
                .apply(arm == self.scenario.optimal, clean, &mut self.attack_rng);
        Ok(Observation {
            round: self.round,
            arm,
            clean_reward: clean,
            attacked,
            observed_reward: observed,
        })
    }
}

/// Built-in scenarios: `(name, description)`.
pub const PRESETS: &[(&str, &str)] = &[
    (
        "paper-k10",
        "10 Gaussian arms N(2i, 1), targeted-uniform attack U(0, 1800), rho 0.125, T = 100000",
    ),
    (
        "radio-sinr",
        "5 channels with mean SINR [41, 37, 35, 31, 28] dB, unit variance, -40 dB jamming offset, rho 0.125, T = 2000",
    ),
];

pub fn preset(name: &str) -> Option<Scenario> {
    let scenario = match name {
        "paper-k10" => Scenario::new(
            (1..=10).map(|i| ArmSpec::gaussian(2.0 * i as f64, 1.0)).collect(),
            AttackSpec {
                rho: 0.125,
                strategy: AttackStrategy::TargetedUniform { magnitude: 1800.0 },
            },
            100_000,
        ),
        "radio-sinr" => Scenario::new(
            [41.0, 37.0, 35.0, 31.0, 28.0]
                .into_iter()
                .map(|m| ArmSpec::gaussian(m, 1.0))
                .collect(),
            AttackSpec {
                rho: 0.125,
                strategy: AttackStrategy::ConstantOffset { offset: 40.0 },
            },
            2000,
        ),
        _ => return None,
    };
    Some(scenario.expect("presets are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> StreamRng {
        StreamRng::seed_from_u64(seed)
    }

    #[test]
    fn degenerate_sigma_stays_at_mean() {
        let arm = ArmSpec::gaussian(5.0, 1e-9);
        let mut r = rng(1);
        for _ in 0..10_000 {
            assert!((sample_clean(&arm, &mut r) - 5.0).abs() <= 6e-9);
        }
    }

    #[test]
    fn standard_normal_mean() {
        let arm = ArmSpec::gaussian(0.0, 1.0);
        let mut r = rng(2);
        let n = 1_000_000;
        let mean = (0..n).map(|_| sample_clean(&arm, &mut r)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "{mean}");
    }

    #[test]
    fn k10_arm_means() {
        let mut r = rng(3);
        for i in 1..=10 {
            let arm = ArmSpec::gaussian(2.0 * i as f64, 1.0);
            let n = 100_000;
            let mean = (0..n).map(|_| sample_clean(&arm, &mut r)).sum::<f64>() / n as f64;
            assert!((mean - 2.0 * i as f64).abs() < 0.05, "arm {i}: {mean}");
        }
    }

    #[test]
    fn no_attack_passes_through() {
        let mut r = rng(4);
        for strategy in [
            AttackStrategy::None,
            AttackStrategy::TargetedUniform { magnitude: 10.0 },
            AttackStrategy::MedianKiller { magnitude: 1e9 },
        ] {
            let spec = AttackSpec { rho: 0.0, strategy };
            assert_eq!(spec.apply(true, 3.7, &mut r), (3.7, false));
        }
    }

    #[test]
    fn forced_constant_offset() {
        let spec = AttackSpec {
            rho: 1.0 - f64::EPSILON,
            strategy: AttackStrategy::ConstantOffset { offset: 100.0 },
        };
        let mut r = rng(5);
        // rho must stay below one; force the draw instead
        let mut hits = 0;
        for _ in 0..1000 {
            let (obs, att) = spec.apply(true, 20.0, &mut r);
            if att {
                assert_eq!(obs, -80.0);
                hits += 1;
            }
        }
        assert_eq!(hits, 1000);
        let (obs, att) = spec.apply(false, 20.0, &mut r);
        assert_eq!((obs, att), (20.0, true));
    }

    #[test]
    fn targeted_uniform_rate_and_sign() {
        let spec = AttackSpec {
            rho: 0.125,
            strategy: AttackStrategy::TargetedUniform { magnitude: 1800.0 },
        };
        let mut r = rng(6);
        let n = 1_000_000;
        let mut hits = 0usize;
        for i in 0..n {
            let optimal = i % 2 == 0;
            let (obs, att) = spec.apply(optimal, 0.0, &mut r);
            if att {
                hits += 1;
                assert!(if optimal { obs <= 0.0 && obs > -1800.0 } else { (0.0..1800.0).contains(&obs) });
            } else {
                assert_eq!(obs, 0.0);
            }
        }
        let frac = hits as f64 / n as f64;
        assert!((frac - 0.125).abs() < 0.003, "{frac}");
    }

    #[test]
    fn attack_spec_validation() {
        let bad = AttackSpec {
            rho: 1.0,
            strategy: AttackStrategy::None,
        };
        assert!(bad.validate().is_err());
        let bad = AttackSpec {
            rho: 0.1,
            strategy: AttackStrategy::TargetedUniform { magnitude: 0.0 },
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn scenario_validation() {
        let two = || vec![ArmSpec::gaussian(1.0, 1.0), ArmSpec::gaussian(2.0, 1.0)];
        assert!(Scenario::new(vec![], AttackSpec::none(), 10).is_err());
        assert!(Scenario::new(vec![ArmSpec::gaussian(1.0, 1.0)], AttackSpec::none(), 10).is_ok());
        assert!(Scenario::new(two(), AttackSpec::none(), 1).is_err());
        assert!(Scenario::new(vec![ArmSpec::gaussian(1.0, 1.0); 2], AttackSpec::none(), 10).is_err());
        assert!(Scenario::new(vec![ArmSpec::gaussian(1.0, 0.0), ArmSpec::gaussian(2.0, 1.0)], AttackSpec::none(), 10).is_err());
        let s = Scenario::new(two(), AttackSpec::none(), 10).unwrap();
        assert_eq!(s.optimal_arm(), 1);
        assert_eq!(s.gaps(), &[1.0, 0.0]);
        assert_eq!(s.min_gap(), 1.0);
    }

    #[test]
    fn step_errors() {
        let s = Scenario::new(
            vec![ArmSpec::gaussian(1.0, 1.0), ArmSpec::gaussian(2.0, 1.0)],
            AttackSpec::none(),
            2,
        )
        .unwrap();
        let mut env = Environment::new(&s, 1);
        assert_eq!(env.step(2), Err(EnvError::ArmOutOfRange { arm: 2, arms: 2 }));
        env.step(0).unwrap();
        let o = env.step(1).unwrap();
        assert_eq!(o.round, 2);
        assert_eq!(env.step(0), Err(EnvError::HorizonExhausted { horizon: 2 }));
    }

    #[test]
    fn rho_zero_step_is_clean() {
        let s = preset("paper-k10").unwrap().with_attack(AttackSpec::none()).unwrap();
        let mut env = Environment::new(&s, 9);
        let o = env.step(2).unwrap();
        assert!(!o.attacked);
        assert_eq!(o.observed_reward, o.clean_reward);
    }

    #[test]
    fn cdf_table_moments() {
        let arm = ArmSpec::CdfTable {
            points: vec![(0.0, 0.0), (1.0, 0.5), (3.0, 1.0)],
        };
        arm.validate().unwrap();
        assert!((arm.mean() - (0.5 * 0.5 + 0.5 * 2.0)).abs() < 1e-12);
        assert_eq!(arm.cdf(1.0), 0.5);
        assert_eq!(arm.quantile(0.5), 1.0);
        assert_eq!(arm.quantile(0.75), 2.0);
        let mut r = rng(8);
        let n = 200_000;
        let m = (0..n).map(|_| sample_clean(&arm, &mut r)).sum::<f64>() / n as f64;
        assert!((m - 1.25).abs() < 0.01);
    }

    #[test]
    fn presets_resolve() {
        for (name, _) in PRESETS {
            assert!(preset(name).is_some());
        }
        let radio = preset("radio-sinr").unwrap();
        assert_eq!(radio.optimal_arm(), 0);
        assert_eq!(radio.horizon(), 2000);
        assert!(preset("nope").is_none());
    }
}
