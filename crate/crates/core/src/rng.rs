//! Labeled, seedable random substreams.
//!
//! One master seed drives a whole run. Every consumer derives its own
//! ChaCha stream from `(seed, domain, index)` — graph sampling keys on the
//! window/interval index, decision sampling on the step index — so the graph
//! process and the agents' coin flips are independent by construction, and
//! re-sampling any one substream never perturbs another.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Substream domain for communication-graph sampling.
pub const DOMAIN_GRAPH: u64 = 1;
/// Substream domain for per-agent averaging/projection decisions.
pub const DOMAIN_DECISION: u64 = 2;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic stream for `(seed, domain, index)`, identical on every
/// platform and invocation.
pub fn substream(seed: u64, domain: u64, index: u64) -> ChaCha12Rng {
    let mut state = seed
        ^ domain.wrapping_mul(0xA076_1D64_78BD_642F)
        ^ index.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}
