//! Closed-form concentration and regret bounds for the median-based policies,
//! the parameter conditions under which they hold, and Gaussian-specific
//! parameter calculators.
//!
//! Every regret evaluator can run checked (refuses when a condition fails)
//! or unchecked (evaluates the formula regardless), see [`Mode`].

pub mod validate;

use std::f64::consts::{E, PI};

use serde::Serialize;
use thiserror::Error;

use crate::env::ArmSpec;
use crate::normal;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("conditions not met: {}", .0.join("; "))]
    ConditionNotMet(Vec<String>),
    #[error("infeasible: {0}")]
    Infeasible(String),
}

/// A distribution function with its generalized quantile.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;
    /// `inf{x : F(x) >= p}`.
    fn quantile(&self, p: f64) -> f64;
}

impl Cdf for ArmSpec {
    fn cdf(&self, x: f64) -> f64 {
        ArmSpec::cdf(self, x)
    }
    fn quantile(&self, p: f64) -> f64 {
        ArmSpec::quantile(self, p)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StandardNormal;

impl Cdf for StandardNormal {
    fn cdf(&self, x: f64) -> f64 {
        normal::cdf(x)
    }
    fn quantile(&self, p: f64) -> f64 {
        normal::quantile(p)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Uniform {
    pub lo: f64,
    pub hi: f64,
}

impl Cdf for Uniform {
    fn cdf(&self, x: f64) -> f64 {
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
    fn quantile(&self, p: f64) -> f64 {
        self.lo + p * (self.hi - self.lo)
    }
}

/// `(P[low-side deviation], P[high-side deviation])` upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBounds {
    pub lower: f64,
    pub upper: f64,
}

// Rounding noise in F(θ_q(F) - a) for a -> 0.
const GAP_SLACK: f64 = 1e-12;

fn exp_tail(n: u64, gap: f64, side: &str) -> Result<f64, BoundError> {
    if gap < -GAP_SLACK {
        return Err(BoundError::Parameter(format!("{side} quantile gap {gap} is negative")));
    }
    let gap = gap.max(0.0);
    Ok((-2.0 * n as f64 * gap * gap).exp())
}

/// Tail bounds for the `p`-quantile of `n` samples of which at most a
/// fraction `s` are arbitrarily corrupted:
/// `P[θ_p - θ_{p-s}(F) <= -a] <= exp(-2n[p - s - F(θ_{p-s}(F) - a)]²)` and
/// `P[θ_p - θ_{p+s}(F) >= b] <= exp(-2n[F(θ_{p+s}(F) + b) - p - s]²)`.
pub fn quantile_tail_bounds<F: Cdf + ?Sized>(
    n: u64,
    s: f64,
    p: f64,
    a: f64,
    b: f64,
    dist: &F,
) -> Result<TailBounds, BoundError> {
    if n == 0 {
        return Err(BoundError::Parameter("sample count must be positive".into()));
    }
    if !(0.0..1.0).contains(&s) {
        return Err(BoundError::Parameter(format!("corruption fraction {s} outside [0, 1)")));
    }
    if !(p > s && p < 1.0 - s) {
        return Err(BoundError::Parameter(format!("quantile level {p} outside ({s}, {})", 1.0 - s)));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(BoundError::Parameter(format!("deviations a = {a}, b = {b} must be positive")));
    }
    let lo_q = dist.quantile(p - s);
    let hi_q = dist.quantile(p + s);
    let p1 = p - s - dist.cdf(lo_q - a);
    let p2 = dist.cdf(hi_q + b) - p - s;
    Ok(TailBounds {
        lower: exp_tail(n, p1, "lower")?,
        upper: exp_tail(n, p2, "upper")?,
    })
}

/// [`quantile_tail_bounds`] at the median.
pub fn median_tail_bounds<F: Cdf + ?Sized>(n: u64, s: f64, a: f64, b: f64, dist: &F) -> Result<TailBounds, BoundError> {
    if !(s > 0.0 && s < 0.5) {
        return Err(BoundError::Parameter(format!("corruption fraction {s} outside (0, 1/2)")));
    }
    quantile_tail_bounds(n, s, 0.5, a, b, dist)
}

/// Which statement of the attacked-fraction sample threshold to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma3Variant {
    /// `⌈(1/(2ε₀²)) ln(K/(2ε₀²δ))⌉ + 1`
    Lemma,
    /// `⌈(1/(2ε₀²)) ln(K/(ε₀²δ))⌉ + 1`, as restated in the high-probability proof.
    HighProbProof,
}

/// Ceiling that ignores floating point noise just above an integer.
fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Samples per arm after which every arm's attacked fraction stays below
/// `ρ + ε₀` with probability at least `1 - δ`.
pub fn lemma3_min_samples(arms: u64, epsilon0: f64, delta: f64, variant: Lemma3Variant) -> Result<u64, BoundError> {
    if arms == 0 {
        return Err(BoundError::Parameter("need at least one arm".into()));
    }
    if !(epsilon0 > 0.0 && epsilon0 < 1.0) {
        return Err(BoundError::Parameter(format!("epsilon0 = {epsilon0} outside (0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BoundError::Parameter(format!("delta = {delta} outside (0, 1)")));
    }
    let e2 = epsilon0 * epsilon0;
    let inner = match variant {
        Lemma3Variant::Lemma => arms as f64 / (2.0 * e2 * delta),
        Lemma3Variant::HighProbProof => arms as f64 / (e2 * delta),
    };
    let n = ceil_snapped(inner.ln() / (2.0 * e2)).max(0.0) as u64 + 1;
    Ok(n)
}

/// Distribution constants the analysis needs.
///
/// `s` is the quantile gap, `l` and `xi` the density floor and the width of
/// the neighbourhood it holds on, `x0` the point separating the optimal arm
/// from the rest, `rho` the attack probability and `delta` the failure
/// probability of the high-probability statements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisParams {
    pub s: f64,
    pub l: f64,
    pub xi: f64,
    pub x0: f64,
    pub rho: f64,
    pub delta: f64,
}

impl AnalysisParams {
    pub fn epsilon0(&self) -> f64 {
        self.s - self.rho
    }
}

/// Algorithm parameters a bound depends on. Fields a theorem does not use
/// are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AlgoParams {
    pub b: f64,
    pub omega: f64,
    pub group_size: u64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Checked,
    Unchecked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// Pseudo-regret of the exploration-aided median UCB.
    MedEUcbPseudo,
    /// High-probability regret of the exploration-aided median UCB.
    MedEUcbHighProb,
    /// Pseudo-regret of median ε-greedy.
    MedEpsGreedyPseudo,
    /// High-probability regret of median ε-greedy.
    MedEpsGreedyHighProb,
    /// Gaussian specialisation for the median UCB.
    GaussianMedEUcb,
    /// Gaussian specialisation for median ε-greedy.
    GaussianMedEpsGreedy,
}

impl Theorem {
    pub fn tag(&self) -> &'static str {
        match self {
            Theorem::MedEUcbPseudo => "med-e-ucb-pseudo",
            Theorem::MedEUcbHighProb => "med-e-ucb-highprob",
            Theorem::MedEpsGreedyPseudo => "med-eps-greedy-pseudo",
            Theorem::MedEpsGreedyHighProb => "med-eps-greedy-highprob",
            Theorem::GaussianMedEUcb => "gaussian-med-e-ucb",
            Theorem::GaussianMedEpsGreedy => "gaussian-med-eps-greedy",
        }
    }
}

/// One inequality `lhs (op) rhs` and whether it holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub lhs: f64,
    pub op: &'static str,
    pub rhs: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub theorem: Theorem,
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    fn into_result(self) -> Result<(), BoundError> {
        if self.passed() {
            Ok(())
        } else {
            Err(BoundError::ConditionNotMet(
                self.failures()
                    .iter()
                    .map(|c| format!("{} ({} {} {})", c.name, c.lhs, c.op, c.rhs))
                    .collect(),
            ))
        }
    }
}

struct Checks(Vec<ConditionCheck>);

impl Checks {
    fn lt(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) {
        self.push(name, lhs, "<", rhs, lhs < rhs);
    }
    fn gt(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) {
        self.push(name, lhs, ">", rhs, lhs > rhs);
    }
    fn ge(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) {
        self.push(name, lhs, ">=", rhs, lhs >= rhs);
    }
    fn push(&mut self, name: impl Into<String>, lhs: f64, op: &'static str, rhs: f64, passed: bool) {
        self.0.push(ConditionCheck {
            name: name.into(),
            lhs,
            op,
            rhs,
            passed,
        });
    }
}

fn optimal_index(arms: &[ArmSpec]) -> usize {
    let mut best = 0;
    for (i, a) in arms.iter().enumerate() {
        if a.mean() > arms[best].mean() {
            best = i;
        }
    }
    best
}

fn suboptimal(arms: &[ArmSpec]) -> impl Iterator<Item = (usize, f64)> + '_ {
    let star = optimal_index(arms);
    let best = arms[star].mean();
    arms.iter()
        .enumerate()
        .filter(move |&(j, _)| j != star)
        .map(move |(j, a)| (j, best - a.mean()))
}

/// `θ_{1/2-s}(F_{i*}) - θ_{1/2+s}(F_j)`.
pub fn median_gap(arms: &[ArmSpec], j: usize, s: f64) -> f64 {
    let star = optimal_index(arms);
    arms[star].quantile(0.5 - s) - arms[j].quantile(0.5 + s)
}

/// Evaluate every stated inequality of `theorem`.
pub fn check_conditions(
    theorem: Theorem,
    arms: &[ArmSpec],
    analysis: &AnalysisParams,
    algo: &AlgoParams,
    horizon: f64,
) -> ConditionReport {
    let mut c = Checks(Vec::new());
    let AnalysisParams { s, l, xi, x0, rho, delta } = *analysis;
    let star = optimal_index(arms);
    match theorem {
        Theorem::MedEUcbPseudo | Theorem::MedEUcbHighProb => {
            c.lt("rho < s", rho, s);
            c.lt("s < 1/2", s, 0.5);
            for (j, _) in suboptimal(arms) {
                c.gt(format!("median gap of arm {j} > 0"), median_gap(arms, j, s), 0.0);
            }
            c.gt("T > G", horizon, algo.group_size as f64);
            c.ge("b >= omega/xi^2", algo.b, algo.omega / (xi * xi));
            c.ge("b >= 2/(s-rho)^2", algo.b, 2.0 / (s - rho).powi(2));
            if theorem == Theorem::MedEUcbPseudo {
                c.ge("omega >= 2/l^2", algo.omega, 2.0 / (l * l));
            } else {
                c.ge("omega >= 3.5/l^2", algo.omega, 3.5 / (l * l));
                c.gt("delta > 0", delta, 0.0);
                c.lt("delta < 1", delta, 1.0);
            }
        }
        Theorem::MedEpsGreedyPseudo | Theorem::MedEpsGreedyHighProb => {
            let (floor, k_side, k_rho) = if theorem == Theorem::MedEpsGreedyPseudo {
                (20.0, 2.0, 2.0)
            } else {
                (40.0, 4.0, 1.0)
            };
            c.lt("rho < s", rho, s);
            let f_star = arms[star].cdf(x0);
            c.lt("F_opt(x0) < 1/2 - s", f_star, 0.5 - s);
            for (j, _) in suboptimal(arms) {
                c.gt(format!("F_{j}(x0) > 1/2 + s"), arms[j].cdf(x0), 0.5 + s);
            }
            c.gt(format!("c > {floor}"), algo.c, floor);
            for (j, _) in suboptimal(arms) {
                let d = arms[j].cdf(x0) - 0.5 - s;
                c.gt(format!("c > {k_side}/(F_{j}(x0)-1/2-s)^2"), algo.c, k_side / (d * d));
            }
            let d = 0.5 - s - f_star;
            c.gt(format!("c > {k_side}/(1/2-s-F_opt(x0))^2"), algo.c, k_side / (d * d));
            c.gt(format!("c > {k_rho}/(s-rho)^2"), algo.c, k_rho / (s - rho).powi(2));
            if theorem == Theorem::MedEpsGreedyHighProb {
                c.gt("delta > 0", delta, 0.0);
                c.lt("delta < 1", delta, 1.0);
            }
        }
        Theorem::GaussianMedEUcb | Theorem::GaussianMedEpsGreedy => {
            let Some((dmin, sigma)) = gaussian_shape(arms) else {
                c.push("arms are Gaussian with a shared sigma", 0.0, "==", 1.0, false);
                return ConditionReport { theorem, checks: c.0 };
            };
            let thr = gaussian_threshold_rho(dmin, sigma).unwrap_or(0.0);
            c.lt("rho < Phi(dmin/(4 sigma)) - 1/2", rho, thr);
            if theorem == Theorem::GaussianMedEUcb {
                let lg = gaussian_density_floor(dmin, sigma);
                c.ge("b >= omega", algo.b, algo.omega);
                c.ge("b >= 2/(Phi(dmin/(4 sigma))-1/2-rho)^2", algo.b, 2.0 / (thr - rho).powi(2));
                c.ge("omega >= 2/l^2", algo.omega, 2.0 / (lg * lg));
            } else {
                let spread = normal::cdf(dmin / (2.0 * sigma)) - normal::cdf(dmin / (4.0 * sigma));
                c.gt("c > 10", algo.c, 10.0);
                c.gt(
                    "c > 1/(Phi(dmin/(2 sigma))-Phi(dmin/(4 sigma)))^2",
                    algo.c,
                    1.0 / (spread * spread),
                );
                c.gt("c > 1/(Phi(dmin/(4 sigma))-1/2-rho)^2", algo.c, 1.0 / (thr - rho).powi(2));
            }
        }
    }
    ConditionReport { theorem, checks: c.0 }
}

fn gaussian_shape(arms: &[ArmSpec]) -> Option<(f64, f64)> {
    let mut sigma = None;
    for a in arms {
        match (a, sigma) {
            (ArmSpec::Gaussian { sigma: s, .. }, None) => sigma = Some(*s),
            (ArmSpec::Gaussian { sigma: s, .. }, Some(prev)) if *s == prev => {}
            _ => return None,
        }
    }
    let dmin = suboptimal(arms).map(|(_, d)| d).fold(f64::INFINITY, f64::min);
    Some((dmin, sigma?))
}

fn check_horizon(horizon: f64) -> Result<(), BoundError> {
    if horizon >= 1.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(BoundError::Parameter(format!("horizon {horizon} must be at least 1")))
    }
}

fn check_delta(delta: f64) -> Result<(), BoundError> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(BoundError::Parameter(format!("delta = {delta} outside (0, 1)")))
    }
}

fn med_e_ucb_common(arms: &[ArmSpec], analysis: &AnalysisParams, algo: &AlgoParams, horizon: f64) -> f64 {
    let (b, omega) = (algo.b, algo.omega);
    suboptimal(arms)
        .map(|(j, d)| {
            let gap = median_gap(arms, j, analysis.s);
            let explore = if gap > 0.0 {
                4.0 * omega * horizon.ln() / (gap * gap)
            } else {
                f64::INFINITY
            };
            d * b * (2.0 * horizon).ln() + d * explore
        })
        .sum()
}

/// Pseudo-regret bound of the exploration-aided median UCB:
/// `Σ Δ_j b ln(2T) + Σ Δ_j 4ω ln T / gap_j² + Σ Δ_j (2 + 2π²/3)`.
pub fn pseudo_regret_bound_med_e_ucb(
    arms: &[ArmSpec],
    analysis: &AnalysisParams,
    algo: &AlgoParams,
    horizon: f64,
    mode: Mode,
) -> Result<f64, BoundError> {
    check_horizon(horizon)?;
    if mode == Mode::Checked {
        check_conditions(Theorem::MedEUcbPseudo, arms, analysis, algo, horizon).into_result()?;
    }
    let constant: f64 = suboptimal(arms).map(|(_, d)| d * (2.0 + 2.0 * PI * PI / 3.0)).sum();
    Ok(med_e_ucb_common(arms, analysis, algo, horizon) + constant)
}

/// High-probability regret bound of the exploration-aided median UCB; adds
/// `Σ Δ_j (e (bK/(2δ))^{1/4} + 2K/δ + 3 + π²/3)`.
pub fn regret_bound_highprob_med_e_ucb(
    arms: &[ArmSpec],
    analysis: &AnalysisParams,
    algo: &AlgoParams,
    horizon: f64,
    mode: Mode,
) -> Result<f64, BoundError> {
    check_horizon(horizon)?;
    check_delta(analysis.delta)?;
    if mode == Mode::Checked {
        check_conditions(Theorem::MedEUcbHighProb, arms, analysis, algo, horizon).into_result()?;
    }
    let k = arms.len() as f64;
    let delta = analysis.delta;
    let per_arm = E * (algo.b * k / (2.0 * delta)).powf(0.25) + 2.0 * k / delta + 3.0 + PI * PI / 3.0;
    let constant: f64 = suboptimal(arms).map(|(_, d)| d * per_arm).sum();
    Ok(med_e_ucb_common(arms, analysis, algo, horizon) + constant)
}

/// Pseudo-regret bound of median ε-greedy:
/// `c Σ Δ_j ln T + 2cKe μ* + Σ (2 + 3c) Δ_j`.
pub fn pseudo_regret_bound_med_eps_greedy(
    arms: &[ArmSpec],
    analysis: &AnalysisParams,
    algo: &AlgoParams,
    horizon: f64,
    mode: Mode,
) -> Result<f64, BoundError> {
    check_horizon(horizon)?;
    if mode == Mode::Checked {
        check_conditions(Theorem::MedEpsGreedyPseudo, arms, analysis, algo, horizon).into_result()?;
    }
    let c = algo.c;
    let k = arms.len() as f64;
    let best = arms[optimal_index(arms)].mean();
    let sum_gaps: f64 = suboptimal(arms).map(|(_, d)| d).sum();
    Ok(c * sum_gaps * horizon.ln() + 2.0 * c * k * E * best + (2.0 + 3.0 * c) * sum_gaps)
}

/// High-probability regret bound of median ε-greedy:
/// `6⌈c⌉²K³μ*/δ + Σ 2cΔ_j ln T + Σ 2cΔ_j`.
pub fn regret_bound_highprob_med_eps_greedy(
    arms: &[ArmSpec],
    analysis: &AnalysisParams,
    algo: &AlgoParams,
    horizon: f64,
    mode: Mode,
) -> Result<f64, BoundError> {
    check_horizon(horizon)?;
    check_delta(analysis.delta)?;
    if mode == Mode::Checked {
        check_conditions(Theorem::MedEpsGreedyHighProb, arms, analysis, algo, horizon).into_result()?;
    }
    let c = algo.c;
    let k = arms.len() as f64;
    let best = arms[optimal_index(arms)].mean();
    let sum_gaps: f64 = suboptimal(arms).map(|(_, d)| d).sum();
    Ok(6.0 * c.ceil().powi(2) * k.powi(3) * best / analysis.delta
        + 2.0 * c * sum_gaps * horizon.ln()
        + 2.0 * c * sum_gaps)
}

/// Largest attack probability the Gaussian specialisations tolerate:
/// `Φ(Δ_min/(4σ)) - 1/2`.
pub fn gaussian_threshold_rho(delta_min: f64, sigma: f64) -> Result<f64, BoundError> {
    if delta_min.is_nan() || delta_min < 0.0 {
        return Err(BoundError::Parameter(format!("minimum gap {delta_min} must be non-negative")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(BoundError::Parameter(format!("sigma {sigma} must be positive")));
    }
    Ok(normal::cdf(delta_min / (4.0 * sigma)) - 0.5)
}

/// `(1/√(2πσ²)) exp(-(Δ_min + 4)²/(32σ²))`.
pub fn gaussian_density_floor(delta_min: f64, sigma: f64) -> f64 {
    (-(delta_min + 4.0).powi(2) / (32.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt()
}

/// Theory-compliant constants for equal-variance Gaussian arms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianParams {
    pub s: f64,
    pub l: f64,
    pub xi: f64,
    pub omega_min: f64,
    pub b_min: f64,
    /// Infimum of the admissible `c` (the condition is strict).
    pub c_min: f64,
}

pub fn gaussian_params(delta_min: f64, sigma: f64, rho: f64) -> Result<GaussianParams, BoundError> {
    let s = gaussian_threshold_rho(delta_min, sigma)?;
    if rho.is_nan() || rho < 0.0 {
        return Err(BoundError::Parameter(format!("attack probability {rho} must be non-negative")));
    }
    if rho >= s {
        return Err(BoundError::Infeasible(format!(
            "attack probability {rho} is not below the Gaussian threshold {s}"
        )));
    }
    let l = gaussian_density_floor(delta_min, sigma);
    let omega_min = 2.0 / (l * l);
    let b_min = omega_min.max(2.0 / (s - rho).powi(2));
    let spread = normal::cdf(delta_min / (2.0 * sigma)) - normal::cdf(delta_min / (4.0 * sigma));
    let c_min = 10.0_f64.max(1.0 / (spread * spread)).max(1.0 / (s - rho).powi(2));
    Ok(GaussianParams {
        s,
        l,
        xi: 1.0,
        omega_min,
        b_min,
        c_min,
    })
}

impl GaussianParams {
    /// Analysis constants for arms whose best mean is `best_mean`; the
    /// separating point sits at `μ* - Δ_min/2`.
    pub fn analysis(&self, best_mean: f64, delta_min: f64, rho: f64, delta: f64) -> AnalysisParams {
        AnalysisParams {
            s: self.s,
            l: self.l,
            xi: self.xi,
            x0: best_mean - delta_min / 2.0,
            rho,
            delta,
        }
    }
}

/// Evaluate the regret bound tied to `theorem`. The Gaussian
/// specialisations check their own conditions and then evaluate the
/// matching pseudo-regret formula.
pub fn evaluate(
    theorem: Theorem,
    arms: &[ArmSpec],
    analysis: &AnalysisParams,
    algo: &AlgoParams,
    horizon: f64,
    mode: Mode,
) -> Result<f64, BoundError> {
    match theorem {
        Theorem::MedEUcbPseudo => pseudo_regret_bound_med_e_ucb(arms, analysis, algo, horizon, mode),
        Theorem::MedEUcbHighProb => regret_bound_highprob_med_e_ucb(arms, analysis, algo, horizon, mode),
        Theorem::MedEpsGreedyPseudo => pseudo_regret_bound_med_eps_greedy(arms, analysis, algo, horizon, mode),
        Theorem::MedEpsGreedyHighProb => regret_bound_highprob_med_eps_greedy(arms, analysis, algo, horizon, mode),
        Theorem::GaussianMedEUcb | Theorem::GaussianMedEpsGreedy => {
            if mode == Mode::Checked {
                check_conditions(theorem, arms, analysis, algo, horizon).into_result()?;
            }
            let inner = if theorem == Theorem::GaussianMedEUcb {
                Theorem::MedEUcbPseudo
            } else {
                Theorem::MedEpsGreedyPseudo
            };
            evaluate(inner, arms, analysis, algo, horizon, Mode::Unchecked)
        }
    }
}

/// Infimum of `c` satisfying the median ε-greedy conditions of `theorem`
/// (pseudo-regret or high-probability).
pub fn eps_greedy_c_floor(theorem: Theorem, arms: &[ArmSpec], analysis: &AnalysisParams) -> f64 {
    let report = check_conditions(theorem, arms, analysis, &AlgoParams::default(), 1.0);
    report
        .checks
        .iter()
        .filter(|c| c.name.starts_with("c >"))
        .map(|c| c.rhs)
        .fold(0.0, f64::max)
}
