//! Named, seedable random streams.
//!
//! Every simulated object (a chain, a replica, a coupled pair) draws from its
//! own [`RngStream`], keyed by `(experiment, replica, chain)`. Streams are
//! ChaCha8 instances sharing the 64-bit master seed and differing in the
//! ChaCha stream id, so the draws of one replica never depend on how many
//! other replicas ran before it or on which thread.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Identifies one independent stream below a master seed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub experiment: String,
    pub replica: u64,
    pub chain: u64,
}

impl StreamKey {
    pub fn new(experiment: impl Into<String>, replica: u64, chain: u64) -> Self {
        Self {
            experiment: experiment.into(),
            replica,
            chain,
        }
    }

    /// 64-bit stream id (FNV-1a over the label, then splitmix over the indices).
    pub fn stream_id(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.experiment.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h = splitmix64(h ^ splitmix64(self.replica));
        splitmix64(h ^ splitmix64(self.chain.wrapping_add(0x9e37_79b9_7f4a_7c15)))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Master seed plus experiment label; hands out per-replica streams.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Streams {
    pub seed: u64,
    pub experiment: String,
}

impl Streams {
    pub fn new(seed: u64, experiment: impl Into<String>) -> Self {
        Self {
            seed,
            experiment: experiment.into(),
        }
    }

    pub fn stream(&self, replica: u64, chain: u64) -> RngStream {
        RngStream::new(self.seed, &StreamKey::new(self.experiment.clone(), replica, chain))
    }

    /// Same seed, label extended with `suffix`.
    pub fn sub(&self, suffix: &str) -> Streams {
        Streams::new(self.seed, format!("{}/{}", self.experiment, suffix))
    }
}

/// An exclusively owned random stream.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, key: &StreamKey) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(key.stream_id());
        Self { seed, rng }
    }

    /// Shorthand for a stream keyed by label and replica index, chain 0.
    pub fn named(seed: u64, experiment: &str, replica: u64) -> Self {
        Self::new(seed, &StreamKey::new(experiment, replica, 0))
    }

    /// Master seed this stream was derived from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn fill_standard_normal(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.rng.sample(StandardNormal);
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
