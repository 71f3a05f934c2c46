//! Deterministic quasi-random directions on the unit sphere of `R^{n+1}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::Paravector;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let inv = 1.0 / base as f64;
    let mut factor = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base as u64) as f64 * factor;
        index /= base as u64;
        factor *= inv;
    }
    out
}

/// Unit vectors of `R^{dim}`: the `2 dim` signed coordinate axes first, then
/// Halton points (Cranley-Patterson rotated by `seed`) pushed through Box-Muller
/// and normalized. Exactly `max(count, 2 dim)` points are returned.
pub fn sphere_directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(dim >= 1 && dim <= 2 * PRIMES.len());
    let mut out = Vec::with_capacity(count.max(2 * dim));
    for k in 0..dim {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; dim];
            v[k] = s;
            out.push(v);
        }
    }
    let pairs = dim.div_ceil(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..2 * pairs).map(|_| rng.gen::<f64>()).collect();
    let mut index = 1u64;
    while out.len() < count {
        let mut v = Vec::with_capacity(2 * pairs);
        for p in 0..pairs {
            let u1 = (radical_inverse(index, PRIMES[2 * p]) + shift[2 * p]).fract();
            let u2 = (radical_inverse(index, PRIMES[2 * p + 1]) + shift[2 * p + 1]).fract();
            let radius = (-2.0 * (1.0 - u1).max(f64::MIN_POSITIVE).ln()).sqrt();
            let angle = 2.0 * std::f64::consts::PI * u2;
            v.push(radius * angle.cos());
            v.push(radius * angle.sin());
        }
        v.truncate(dim);
        index += 1;
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

/// Points of the sphere `|x| = r` in `R^{n+1}` as paravectors.
pub fn sphere_points(n: usize, r: f64, count: usize, seed: u64) -> Vec<Paravector<f64>> {
    sphere_directions(n + 1, count, seed)
        .into_iter()
        .map(|d| Paravector::new(r * d[0], d[1..].iter().map(|x| r * x).collect()))
        .collect()
}

/// Pseudo-random points of the ball `|x| <= r`, seeded.
pub fn ball_points(n: usize, r: f64, count: usize, seed: u64) -> Vec<Paravector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    sphere_directions(n + 1, count, seed)
        .into_iter()
        .map(|d| {
            let rho = r * rng.gen::<f64>().powf(1.0 / (n + 1) as f64);
            Paravector::new(rho * d[0], d[1..].iter().map(|x| rho * x).collect())
        })
        .collect()
}
