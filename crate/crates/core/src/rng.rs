//! Seed derivation and per-purpose random streams.
//!
//! Every round owns a single 64-bit seed. Independent ChaCha streams are
//! carved out of it so that, for example, the number of on-off trials drawn
//! never shifts the encounter sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RoundRng = ChaCha8Rng;

/// Purpose of a random stream within one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Profiles = 0,
    Encounters = 1,
    Activity = 2,
    Seeds = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of round `round` under `master`. Depends only on the pair, never on
/// scheduling order.
pub fn derive_seed(master: u64, round: u64) -> u64 {
    splitmix64(master ^ splitmix64(round.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

pub fn stream(seed: u64, purpose: Stream) -> RoundRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}
