//! Seed splitting. Every random stream in the crate is derived from a master
//! seed with [`derive`], so parallel work stays reproducible regardless of
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags keep derived seeds of different subsystems apart.
pub mod stream {
    pub const STEINER_RESTART: u64 = 1;
    pub const SUBSAMPLE_TRIAL: u64 = 2;
    pub const GREEDY_ALPHA: u64 = 3;
    pub const EXPERIMENT: u64 = 4;
    pub const RANDOM_INSTANCE: u64 = 5;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed `index` of stream `stream` under `master`:
/// `splitmix64(splitmix64(master ^ splitmix64(stream)) + index)`.
pub fn derive(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(stream)).wrapping_add(index))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(master: u64, stream: u64, index: u64) -> Rng {
    rng(derive(master, stream, index))
}
