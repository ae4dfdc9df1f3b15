//! Stochastic multi-armed bandits whose observed rewards are, with
//! probability ρ per round, replaced by arbitrarily large adversarial values.
//!
//! - [`env`]: arms, attacks, scenarios and presets.
//! - [`estimators`]: streaming order statistics, exact means, trimmed means
//!   and the Catoni estimator.
//! - [`policies`]: the two median-based policies and seven baselines.
//! - [`bounds`]: concentration and regret bound evaluators, their
//!   conditions, and Monte Carlo checks.
//! - [`harness`]: seeded trials, aggregation and growth fits.
//! - [`cli`]: the `robust-mab` command line.

pub mod bounds;
pub mod cli;
pub mod config;
pub mod env;
pub mod estimators;
pub mod exec;
pub mod harness;
pub mod normal;
pub mod plot;
pub mod policies;
pub mod rng;

pub use env::{ArmSpec, AttackSpec, AttackStrategy, Scenario};
pub use exec::Execution;
pub use harness::{run_experiment, run_trial, AggregateCurve, TrialTrace};
pub use policies::{Policy, PolicyConfig};
