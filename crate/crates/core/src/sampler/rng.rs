//! Seed schedule and counter-based channel draws.
//!
//! Trial `t` of an experiment with base seed `b` uses
//! `trial_seed(b, t) = splitmix64(b + (t + 1) * GOLDEN_GAMMA)`. Key rings come
//! from a ChaCha8 stream seeded with the trial seed; the on/off state of the
//! channel between nodes `i < j` is a pure function of the trial seed and
//! `(i, j)`, so it does not depend on which pairs happened to share keys.

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Domain separator between the key-ring stream and the channel draws.
const CHANNEL_DOMAIN: u64 = 0x6A09_E667_F3BC_C909;

/// SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    splitmix64(base_seed.wrapping_add(trial.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Keyed channel sampler for one graph realisation.
#[derive(Debug, Clone, Copy)]
pub struct ChannelDraws {
    key: u64,
    n: u64,
    /// `p` scaled to the 53-bit grid; a channel is on iff its draw is below it.
    cutoff: u64,
}

const UNIT_BITS: u32 = 53;

impl ChannelDraws {
    pub fn new(seed: u64, n: usize, channel_prob: f64) -> Self {
        let scale = (1u64 << UNIT_BITS) as f64;
        // p = 1 maps to 2^53, above every 53-bit draw
        let cutoff = (channel_prob.clamp(0.0, 1.0) * scale).ceil() as u64;
        Self {
            key: splitmix64(seed ^ CHANNEL_DOMAIN),
            n: n as u64,
            cutoff,
        }
    }

    /// Raw 64-bit draw for the unordered pair `i < j`.
    pub fn raw(&self, i: u32, j: u32) -> u64 {
        let counter = u64::from(i) * self.n + u64::from(j) + 1;
        splitmix64(self.key.wrapping_add(counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    pub fn is_on(&self, i: u32, j: u32) -> bool {
        (self.raw(i, j) >> (64 - UNIT_BITS)) < self.cutoff
    }
}
