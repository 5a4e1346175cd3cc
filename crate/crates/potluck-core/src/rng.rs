//! Deterministic RNG stream derivation.
//!
//! One master seed fans out into independent named streams: one for the
//! demand process, one per agent for predictor-pool sampling and initial
//! weights, and one per (agent, predictor slot) for predictors that draw
//! random numbers. Streams never share state, so the order in which agents
//! are evaluated within a round cannot change any draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tag mixed into the derived seed, keeping streams disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamDomain {
    /// Per-agent production capacities drawn once at setup.
    Capacity,
    /// Per-agent sampling of k predictors from the global pool.
    PredictorPool,
    /// Per-agent random initial weights (when configured).
    InitialWeights,
    /// Per-(agent, slot) stream consumed by predictors that randomize.
    Predictor,
    /// The demand process stream.
    Demand,
}

impl StreamDomain {
    fn tag(self) -> u64 {
        match self {
            StreamDomain::Capacity => 1,
            StreamDomain::PredictorPool => 2,
            StreamDomain::InitialWeights => 3,
            StreamDomain::Predictor => 4,
            StreamDomain::Demand => 5,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the seed for stream `(domain, index, sub)` from the master seed.
pub fn derive_seed(master: u64, domain: StreamDomain, index: u64, sub: u64) -> u64 {
    let mut s = splitmix64(master ^ splitmix64(domain.tag()));
    s = splitmix64(s ^ splitmix64(index));
    splitmix64(s ^ splitmix64(sub))
}

/// A fresh, independent RNG for the named stream.
pub fn stream_rng(master: u64, domain: StreamDomain, index: u64, sub: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, domain, index, sub))
}
