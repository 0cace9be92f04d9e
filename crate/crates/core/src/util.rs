//! Small integer and RNG helpers shared across modules.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exact ceiling square root of a u64 (no floating-point edge cases).
pub(crate) fn ceil_sqrt(x: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt().ceil() as u64;
    while r > 0 && (r - 1).saturating_mul(r - 1) >= x {
        r -= 1;
    }
    while r.saturating_mul(r) < x {
        r += 1;
    }
    r
}

/// Exact `⌈log2 log2 t⌉` for `t ≥ 2`: the smallest `k ≥ 0` with
/// `2^(2^k) ≥ t`.
pub(crate) fn ceil_log2_log2(t: u64) -> u32 {
    debug_assert!(t >= 2);
    let mut k = 0u32;
    loop {
        let e = 1u32 << k;
        if e >= 128 || (1u128 << e) >= t as u128 {
            return k;
        }
        k += 1;
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based stream: a fresh generator keyed by `(seed, counter)`.
/// The same key always yields the same stream, independent of call order.
pub(crate) fn keyed_rng(seed: u64, counter: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(splitmix(seed).wrapping_add(
        counter.wrapping_mul(0x9E37_79B9_7F4A_7C15),
    )))
}
