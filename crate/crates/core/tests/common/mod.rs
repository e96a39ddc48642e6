#![allow(dead_code)]

use std::collections::BTreeMap;

use metproj::{Ball, SeqVector, Tail, Vector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn v(c: &[f64]) -> Vector {
    Vector::new(c.to_vec()).unwrap()
}

pub fn gaussian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vector {
    let c: Vec<f64> = (0..dim)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Vector::new(c).unwrap()
}

pub fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    loop {
        let g = gaussian(rng, dim, 1.0);
        let n = g.norm();
        if n > 1e-3 {
            return g.scale(1.0 / n);
        }
    }
}

pub fn random_ball(rng: &mut ChaCha8Rng, dim: usize) -> Ball {
    let center = gaussian(rng, dim, 2.0);
    let radius = rng.random_range(0.5..3.0);
    Ball::new(center, radius).unwrap()
}

/// Point at distance `dist_factor·r` from the center in a random direction.
pub fn point_at(rng: &mut ChaCha8Rng, ball: &Ball, dist_factor: f64) -> Vector {
    let dir = unit_direction(rng, ball.dim());
    ball.center().add_scaled(dist_factor * ball.radius(), &dir)
}

/// Point in the ball (not uniform; radius drawn uniformly).
pub fn point_in_ball(rng: &mut ChaCha8Rng, ball: &Ball) -> Vector {
    let dir = unit_direction(rng, ball.dim());
    let s: f64 = rng.random();
    ball.center().add_scaled(ball.radius() * s, &dir)
}

/// Vector with every |coordinate| in [lo, hi] and the given sign pattern.
pub fn signed_point(rng: &mut ChaCha8Rng, signs: &[f64], lo: f64, hi: f64) -> Vector {
    Vector::new(signs.iter().map(|s| s * rng.random_range(lo..hi)).collect()).unwrap()
}

/// A point of the orthant interior, its negative, or K̂ (mixed signs, dim ≥ 2).
pub fn khat_point(rng: &mut ChaCha8Rng, dim: usize, lo: f64) -> Vector {
    assert!(dim >= 2);
    let mut signs: Vec<f64> = (0..dim)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    signs[0] = 1.0;
    signs[1] = -1.0;
    let k = rng.random_range(0..dim);
    signs.swap(0, k);
    signed_point(rng, &signs, lo, 3.0)
}

/// A point with at least one zero coordinate.
pub fn delta_point(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    let mut c: Vec<f64> = (0..dim)
        .map(|_| match rng.random_range(0..3) {
            0 => 0.0,
            1 => rng.random_range(0.1..3.0),
            _ => -rng.random_range(0.1..3.0),
        })
        .collect();
    let k = rng.random_range(0..dim);
    c[k] = 0.0;
    Vector::new(c).unwrap()
}

/// Random sequence in the cone: a few nonnegative entries over a
/// nonnegative geometric (or zero) tail.
pub fn random_cone_seq(rng: &mut ChaCha8Rng) -> SeqVector {
    let mut overrides = BTreeMap::new();
    for _ in 0..rng.random_range(0..6) {
        let i = rng.random_range(1..20u64);
        let value = if rng.random_range(0..4) == 0 {
            0.0
        } else {
            rng.random_range(0.0..5.0)
        };
        overrides.insert(i, value);
    }
    let tail = if rng.random_range(0..5) == 0 {
        Tail::Zero
    } else {
        Tail::Geometric {
            a: rng.random_range(0.0..4.0),
            rho: rng.random_range(0.1..0.95),
            start: rng.random_range(1..10),
        }
    };
    SeqVector::new(overrides, tail).unwrap()
}

/// Strictly signed geometric sequence with a few same-signed overrides.
pub fn random_signed_seq(rng: &mut ChaCha8Rng, sign: f64) -> SeqVector {
    let mut overrides = BTreeMap::new();
    for i in 1..rng.random_range(1..6u64) {
        overrides.insert(i, sign * rng.random_range(0.1..5.0));
    }
    let tail = Tail::Geometric {
        a: sign * rng.random_range(0.1..4.0),
        rho: rng.random_range(0.3..0.9),
        start: 1,
    };
    SeqVector::new(overrides, tail).unwrap()
}
