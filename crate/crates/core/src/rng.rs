//! Random streams and the variates the simulation needs.
//!
//! Streams are ChaCha8 generators keyed by `(seed, stream index)`, so a run is
//! split into independent partitions whose outputs do not depend on the
//! order in which they are consumed.

use core::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Generator for partition `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform on `(0, 1]`, with 53 random bits.
#[inline]
pub fn open_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Circularly-symmetric complex Gaussian with unit variance (Box-Muller).
///
/// The modulus is drawn as `sqrt(Exp(1))`, which makes `|z|^2 ~ Exp(1)`.
#[inline]
pub fn complex_gaussian<R: RngCore + ?Sized>(rng: &mut R) -> Complex64 {
    let radius = libm::sqrt(-libm::log(open_uniform(rng)));
    let angle = 2.0 * PI * open_uniform(rng);
    Complex64::new(radius * libm::cos(angle), radius * libm::sin(angle))
}

#[inline]
pub fn exponential<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    -libm::log(open_uniform(rng))
}

/// Gamma(shape, 1) for integer shape, as a sum of exponentials.
pub fn gamma_int<R: RngCore + ?Sized>(rng: &mut R, shape: u32) -> f64 {
    // product of uniforms is cheaper but underflows for large shapes
    (0..shape).map(|_| exponential(rng)).sum()
}
