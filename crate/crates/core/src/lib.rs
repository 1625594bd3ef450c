//! Large-sieve concentration estimates across four geometries (line, plane,
//! sphere, hyperbolic disc) and deterministic L1 recovery experiments.

pub mod constants;
pub mod error;
pub mod linalg;
pub mod recovery;
pub mod regions;
pub mod spaces;
pub mod specfun;

pub use error::{Error, Result};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Generator for trial `index` of a suite seeded with `seed`. Each trial gets
/// its own ChaCha stream, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
