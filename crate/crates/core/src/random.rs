//! Seeded random data for property suites and fixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{c, orth, Mat, Vector, C64};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex number with independent standard-uniform parts on [-1, 1].
pub fn complex(rng: &mut Rng64) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn vector(rng: &mut Rng64, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| complex(rng))
}

pub fn matrix(rng: &mut Rng64, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| complex(rng))
}

/// Unitary from orthonormalizing a random square matrix.
pub fn unitary(rng: &mut Rng64, k: usize) -> Mat {
    loop {
        let q = orth(&matrix(rng, k, k), 1e-10);
        if q.ncols() == k {
            return q;
        }
    }
}

/// Point in the closed ball of radius `r`, uniform in direction and radius.
pub fn ball_point(rng: &mut Rng64, n: usize, r: f64) -> Vec<C64> {
    let v = vector(rng, n);
    let scale = r * rng.gen_range(0.0..1.0) / v.norm();
    v.iter().map(|x| x * scale).collect()
}
