//! Seeding. Every random quantity is drawn from `Pcg64` (PCG XSL-RR 128/64).
//!
//! Sample `k` of an ensemble with base seed `s` uses the stream seed
//! `splitmix64(s ⊕ splitmix64(k))`, so samples are independent of each other
//! and of the order they are evaluated in.

use rand::{Rng, SeedableRng};
pub use rand_pcg::Pcg64;

/// The SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sample `index` of an ensemble with seed `base`.
pub fn stream_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

pub fn generator(seed: u64) -> Pcg64 {
    Pcg64::seed_from_u64(seed)
}

/// Uniform draw from `[mean − width/2, mean + width/2)`.
#[inline]
pub fn uniform_angle<R: Rng + ?Sized>(rng: &mut R, mean: f64, width: f64) -> f64 {
    if width == 0.0 {
        return mean;
    }
    let u: f64 = rng.random();
    mean + width * (u - 0.5)
}
