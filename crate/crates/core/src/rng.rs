//! Splittable seeding: every random stream in an experiment is derived from
//! `(master_seed, index, role)` so trials can run in any order or in
//! parallel and still draw exactly the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. Distinct roles never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamRole {
    CleanReward = 1,
    Attack = 2,
    Policy = 3,
    Replicate = 4,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of child `index` of `master`.
pub fn mix(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index)
}

pub fn child_seed(master: u64, index: u64, role: StreamRole) -> u64 {
    splitmix64(mix(master, index) ^ (role as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

pub fn stream(master: u64, index: u64, role: StreamRole) -> StreamRng {
    StreamRng::seed_from_u64(child_seed(master, index, role))
}
