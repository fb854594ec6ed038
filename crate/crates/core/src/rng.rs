//! Seed splitting.
//!
//! Every stochastic operator draws from its own ChaCha stream. The stream key
//! is derived from the master seed, a fixed per-layer constant and the trial
//! index, so re-running one layer never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed stream constants, one per stochastic layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Layer {
    Application = 0x41_5050_4c49_4341,
    Protocol = 0x50_524f_544f_434f,
    Encryption = 0x45_4e43_5259_5054,
    Network = 0x4e_4554_574f_524b,
    Observation = 0x4f_4253_4552_5645,
    Defense = 0x44_4546_454e_5345,
    Sampler = 0x53_414d_504c_4552,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed a layer uses for one trial.
pub fn layer_seed(master: u64, layer: Layer, trial: u64) -> u64 {
    mix64(master ^ (layer as u64) ^ trial.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Seed of trial `trial` for semantic label `label`, used as the per-session
/// seed handed to the operators.
pub fn trial_seed(master: u64, label: u32, trial: u64) -> u64 {
    mix64(mix64(master ^ ((label as u64) << 40)) ^ trial)
}

pub fn layer_rng(seed: u64, layer: Layer) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(layer_seed(seed, layer, 0));
    rng.set_stream(layer as u64);
    rng
}
