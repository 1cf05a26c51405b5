//! Portable random streams.
//!
//! Every stream is ChaCha8 keyed by `ChaCha8Rng::seed_from_u64(seed)` with
//! the 64-bit stream id `purpose << 56 | index << 20 | beacon`. Uniforms take
//! the top 53 bits of `next_u64`; normals use the cosine branch of
//! Box-Muller on two uniforms in (0, 1]. Any ChaCha8 implementation with the
//! same seed expansion reproduces the draws bit for bit.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Survey = 1,
    Query = 2,
    Walk = 3,
    Collect = 4,
    Segmentation = 5,
    Placement = 6,
}

const INDEX_BITS: u32 = 36;
const BEACON_BITS: u32 = 20;

pub fn stream(seed: u64, purpose: Purpose, index: u64, beacon: u64) -> ChaCha8Rng {
    debug_assert!(index < 1 << INDEX_BITS && beacon < 1 << BEACON_BITS);
    let id = (purpose as u64) << 56
        | (index & ((1 << INDEX_BITS) - 1)) << BEACON_BITS
        | (beacon & ((1 << BEACON_BITS) - 1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform in (0, 1].
pub fn unit_open<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in [0, 1).
pub fn unit<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn standard_normal<R: RngCore>(rng: &mut R) -> f64 {
    let u1 = unit_open(rng);
    let u2 = unit(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
