//! Seeded gain generator.
//!
//! The generator is ChaCha20 (`rand_chacha`). A run's stream is fixed by the
//! pair `(master_seed, run_index)`: the 256-bit key holds `master_seed` in
//! its first eight bytes (little-endian) with the remaining bytes zero, and
//! the ChaCha stream id is `run_index`. Uniform reals take the top 53 bits
//! of each `u64` draw, giving values in `[0, 1)`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Name of the pinned generator, as written in config files.
pub const GENERATOR_NAME: &str = "chacha20";

#[derive(Debug, Clone)]
pub struct GainRng {
    inner: ChaCha20Rng,
}

impl GainRng {
    pub fn for_run(master_seed: u64, run_index: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&master_seed.to_le_bytes());
        let mut inner = ChaCha20Rng::from_seed(key);
        inner.set_stream(run_index);
        Self { inner }
    }

    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
