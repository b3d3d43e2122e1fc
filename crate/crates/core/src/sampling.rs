//! Seeded random sampling. Every randomized routine in the crate draws from a
//! ChaCha8 stream built from an explicit `u64` seed, so results are
//! reproducible bit-for-bit.

use alloc::vec::Vec;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::norm2;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sub-task `stream` of a seeded job.
pub fn substream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian(rng: &mut Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Uniform point on the Euclidean unit sphere of `R^d`.
pub fn unit_sphere(rng: &mut Rng, d: usize) -> Vec<f64> {
    loop {
        let mut v = gaussian(rng, d);
        let n = norm2(&v);
        if n > 1e-300 {
            for x in v.iter_mut() {
                *x /= n;
            }
            return v;
        }
    }
}

/// Uniform point in the Euclidean unit ball of `R^d`.
pub fn unit_ball(rng: &mut Rng, d: usize) -> Vec<f64> {
    let mut v = unit_sphere(rng, d);
    let r = libm::pow(rng.random::<f64>(), 1.0 / d as f64);
    for x in v.iter_mut() {
        *x *= r;
    }
    v
}

pub fn uniform(rng: &mut Rng) -> f64 {
    rng.random::<f64>()
}

pub fn index(rng: &mut Rng, n: usize) -> usize {
    rng.random_range(0..n)
}

/// `k` distinct indices from `0..n` (partial Fisher-Yates), in draw order.
pub fn distinct_indices(rng: &mut Rng, n: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let k = k.min(n);
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}
