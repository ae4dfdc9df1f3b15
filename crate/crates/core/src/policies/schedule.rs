//! Block schedule of the exploration-aided median UCB.
//!
//! Rounds are grouped into blocks of `G`. Block 0 opens with `⌈b ln G⌉` pulls
//! of every arm; block `k >= 1` opens with `d_k = ⌈b ln((k+1)G)⌉ - ⌈b ln(kG)⌉`
//! pulls of every arm, so after the forced pulls of block `k` each arm has
//! been pulled at least `⌈b ln((k+1)G)⌉` times.

/// What a round of the exploration-aided UCB does. Arms are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Init(usize),
    Explore(usize),
    UcbRound,
}

/// `⌈b · ln x⌉`, clamped at zero.
#[inline]
pub fn forced_pulls(b: f64, x: u64) -> u64 {
    (b * (x as f64).ln()).ceil().max(0.0) as u64
}

/// Phase of round `t` (1-based) for `arms` arms, group size `group` and
/// exploration parameter `b`.
pub fn phase(t: u64, arms: usize, group: u64, b: f64) -> Phase {
    debug_assert!(t >= 1);
    let k_arms = arms as u64;
    let init = forced_pulls(b, group);
    if init > 0 && t <= k_arms * init {
        return Phase::Init(((t - 1) / init) as usize);
    }
    let k = t / group;
    if k == 0 {
        return Phase::UcbRound;
    }
    let d = forced_pulls(b, (k + 1) * group).saturating_sub(forced_pulls(b, k * group));
    let start = k * group;
    if d > 0 && t > start && t <= start + k_arms * d {
        Phase::Explore(((t - start - 1) / d) as usize)
    } else {
        Phase::UcbRound
    }
}

/// Whether `group` satisfies `G >= K·⌈b ln G⌉` with at least one initial pull per arm.
pub fn group_is_feasible(arms: usize, group: u64, b: f64) -> bool {
    let init = forced_pulls(b, group);
    init >= 1 && group >= arms as u64 * init
}

/// Smallest feasible group size in `2..=limit`.
pub fn min_feasible_group(arms: usize, b: f64, limit: u64) -> Option<u64> {
    (2..=limit).find(|&g| group_is_feasible(arms, g, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_block() {
        // ⌈4 ln 1000⌉ = ⌈27.63⌉ = 28
        assert_eq!(forced_pulls(4.0, 1000), 28);
        assert_eq!(phase(1, 10, 1000, 4.0), Phase::Init(0));
        assert_eq!(phase(28, 10, 1000, 4.0), Phase::Init(0));
        assert_eq!(phase(29, 10, 1000, 4.0), Phase::Init(1));
        assert_eq!(phase(280, 10, 1000, 4.0), Phase::Init(9));
        assert_eq!(phase(281, 10, 1000, 4.0), Phase::UcbRound);
        assert_eq!(phase(1000, 10, 1000, 4.0), Phase::UcbRound);
    }

    #[test]
    fn first_explore_block() {
        // ⌈4 ln 2000⌉ - ⌈4 ln 1000⌉ = 31 - 28 = 3
        let d1 = forced_pulls(4.0, 2000) - forced_pulls(4.0, 1000);
        assert_eq!(d1, 3);
        assert_eq!(phase(1001, 10, 1000, 4.0), Phase::Explore(0));
        assert_eq!(phase(1003, 10, 1000, 4.0), Phase::Explore(0));
        assert_eq!(phase(1004, 10, 1000, 4.0), Phase::Explore(1));
        assert_eq!(phase(1030, 10, 1000, 4.0), Phase::Explore(9));
        assert_eq!(phase(1031, 10, 1000, 4.0), Phase::UcbRound);
    }

    #[test]
    fn empty_slice_is_ucb() {
        // find a block with d_k = 0
        let k = (1..200u64)
            .find(|&k| forced_pulls(4.0, (k + 1) * 1000) == forced_pulls(4.0, k * 1000))
            .unwrap();
        assert_eq!(phase(k * 1000 + 1, 10, 1000, 4.0), Phase::UcbRound);
    }

    #[test]
    fn feasibility() {
        assert!(group_is_feasible(10, 1000, 4.0));
        assert!(!group_is_feasible(10, 200, 4.0));
        assert!(group_is_feasible(5, 200, 4.0));
        assert!(!group_is_feasible(10, 1, 4.0));
        let g = min_feasible_group(10, 4.0, 10_000).unwrap();
        assert!(group_is_feasible(10, g, 4.0) && !group_is_feasible(10, g - 1, 4.0));
    }
}
