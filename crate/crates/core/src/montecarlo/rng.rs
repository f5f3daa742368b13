//! Counter-based sub-streams: `(seed, domain, batch)` maps to an independent
//! ChaCha8 stream, so results never depend on how batches are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies one family of batch streams derived from a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub domain: u64,
}

impl StreamKey {
    pub const fn new(seed: u64, domain: u64) -> Self {
        Self { seed, domain }
    }

    /// A key for a sub-domain, e.g. one report cell.
    pub fn child(self, tag: u64) -> Self {
        let mut state = self.domain ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03);
        Self {
            seed: self.seed,
            domain: splitmix64(&mut state),
        }
    }

    pub fn batch_rng(self, batch: u64) -> ChaCha8Rng {
        let mut state = self.seed ^ self.domain.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(batch);
        rng
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
