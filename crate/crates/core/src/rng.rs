//! Seeded randomness with named substreams.
//!
//! Every random choice in a run is drawn from a substream derived from one
//! master seed and a label such as `("cover", uv_index, x)`. Substreams make
//! runs reproducible independently of evaluation order: two phases never
//! share a generator, so reordering one cannot perturb the other.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// The generator handed to phase code. A thin alias so call sites do not
/// care which concrete RNG backs the substreams.
pub type Substream = ChaCha12Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives independent substreams from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seeder {
    master: u64,
}

impl Seeder {
    pub fn new(master: u64) -> Self {
        Seeder { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Substream named by a label string plus numeric parts, e.g.
    /// `seeder.substream("search", &[alpha, node, rep])`.
    pub fn substream(&self, label: &str, parts: &[u64]) -> Substream {
        let mut state = self.master;
        for byte in label.bytes() {
            state ^= splitmix64(&mut state) ^ u64::from(byte);
        }
        for &p in parts {
            state ^= splitmix64(&mut state) ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        }
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha12Rng::from_seed(seed)
    }

    /// A seeder scoped under this one, for nested phases.
    pub fn child(&self, label: &str, parts: &[u64]) -> Seeder {
        let mut state = self.master;
        for byte in label.bytes() {
            state ^= splitmix64(&mut state) ^ u64::from(byte);
        }
        for &p in parts {
            state ^= splitmix64(&mut state) ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        }
        Seeder {
            master: splitmix64(&mut state),
        }
    }
}
