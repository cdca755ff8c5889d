//! Counter-based random streams.
//!
//! Every random quantity in a simulation is drawn from a ChaCha8 stream keyed
//! by a 64-bit seed and selected by a stream number, so a frame's channel,
//! data and noise depend only on `(master seed, point, frame)` and never on
//! scheduling order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
// inherent float methods take over whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

/// Stream number for the source-relay channel.
pub const LANE_HOP1: u64 = 1;
/// Stream number for the relay-destination channel.
pub const LANE_HOP2: u64 = 2;
/// Stream number for information bits.
pub const LANE_DATA: u64 = 3;
/// Stream number for receiver noise.
pub const LANE_NOISE: u64 = 4;

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, lane)`.
pub fn stream(seed: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(lane);
    rng
}

/// Seed of one simulated frame, derived from the master seed, a point key
/// (e.g. the bit pattern of the SNR value) and the frame counter.
pub fn frame_seed(master: u64, point: u64, frame: u64) -> u64 {
    mix64(mix64(master ^ mix64(point)) ^ frame)
}

/// Circularly-symmetric complex Gaussian sample with the given total variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}
