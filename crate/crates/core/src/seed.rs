//! Reproducible randomness.
//!
//! A single root seed is expanded into per-task seeds with the SplitMix64
//! finalizer, so a batch computed on any number of threads draws exactly the
//! same numbers for task `i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::point::{CPoint, C64};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for task `index` under `root`.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    splitmix64(root.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

pub fn task_rng(root: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, index))
}

/// Standard complex Gaussian (independent real and imaginary parts of variance 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_point<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CPoint {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

/// Uniform sample from the closed disc of the given radius.
pub fn uniform_disc<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> C64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let t = rng.gen::<f64>() * std::f64::consts::TAU;
    C64::from_polar(r, t)
}

pub fn uniform_polydisc<R: Rng + ?Sized>(rng: &mut R, len: usize, radius: f64) -> CPoint {
    (0..len).map(|_| uniform_disc(rng, radius)).collect()
}
