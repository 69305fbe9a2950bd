//! Counter-based random streams keyed by `(seed, replication, lane)`.
//!
//! Every stream is a ChaCha8 generator whose key is derived from the seed,
//! whose stream id is the replication index and whose starting word position
//! is the lane. Two different keys never share output, so work can be
//! scheduled on any number of threads without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Words reserved per lane (2^36 u32 draws).
const LANE_SHIFT: u32 = 36;
/// Lanes are `(domain << 28) | index`, so `LANE_SHIFT + 32 = 68` bits of word position.
const DOMAIN_SHIFT: u32 = 28;
const MAX_INDEX: u64 = 1 << DOMAIN_SHIFT;

/// What a stream is used for. Keeps deployment and frame draws disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lane {
    Gateways,
    /// Cluster `0` is the typical cluster, `i + 1` belongs to gateway `i`.
    Cluster(u64),
    Frame(u64),
}

impl Lane {
    fn id(self) -> u64 {
        let (domain, index) = match self {
            Lane::Gateways => (0, 0),
            Lane::Cluster(i) => (1, i),
            Lane::Frame(i) => (2, i),
        };
        assert!(index < MAX_INDEX, "lane index {index} too large");
        (domain << DOMAIN_SHIFT) | index
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, replication: u64, lane: Lane) -> StreamRng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replication);
    rng.set_word_pos((lane.id() as u128) << LANE_SHIFT);
    rng
}
