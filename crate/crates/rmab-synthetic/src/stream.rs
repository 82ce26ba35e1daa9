//! Derivation of named, independent RNG sub-streams from one run seed.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// A ChaCha stream keyed by (seed, label, index). Distinct keys give
/// statistically independent streams.
pub(crate) fn substream(seed: u64, label: &str, index: u64) -> ChaCha12Rng {
    let key = fnv1a(label.as_bytes()) ^ splitmix(index ^ 0x5eed_cafe_f00d_beef);
    ChaCha12Rng::seed_from_u64(splitmix(seed ^ key))
}
