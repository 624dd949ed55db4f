//! Deterministic seed derivation for independent RNG streams.
//!
//! Every randomized stage draws from its own stream seeded by
//! `derive_seed(master, &[stream, index...])`, so runs are reproducible
//! regardless of thread scheduling and no RNG state is ever shared.

/// Stream tags. Keeping them distinct keeps the streams decorrelated.
pub(crate) mod stream {
    pub const EMBED: u64 = 0x01;
    pub const MATCH: u64 = 0x02;
    pub const COARSEST: u64 = 0x03;
    pub const INSTANCE: u64 = 0x04;
}

/// Mix a master seed with stream/index parts into a new 64-bit seed.
///
/// Uses splitmix64, which is stable across platforms and releases.
pub(crate) fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut state = master;
    let mut out = splitmix64(&mut state);
    for &part in parts {
        state ^= part.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        out ^= splitmix64(&mut state);
    }
    out
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
