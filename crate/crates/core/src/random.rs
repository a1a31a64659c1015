//! Seeded complex Gaussian sampling.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`).
//! Uniforms are `(next_u64 >> 11) * 2^-53`; normals use the Box-Muller
//! transform `sqrt(-2 ln(1 - u1)) * (cos, sin)(2 pi u2)`, so a seed yields the
//! same stream on every platform.

use nalgebra::DMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::C64;

pub struct ComplexGaussian {
    rng: ChaCha8Rng,
}

impl ComplexGaussian {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `lo..hi`.
    pub fn index(&mut self, lo: usize, hi: usize) -> usize {
        lo + ((self.uniform() * (hi - lo) as f64) as usize).min(hi - lo - 1)
    }

    /// Pair of independent standard normals.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// Complex normal with unit variance per component.
    pub fn complex(&mut self) -> C64 {
        let (re, im) = self.normal_pair();
        C64::new(re, im)
    }

    pub fn vector(&mut self, len: usize) -> Vec<C64> {
        (0..len).map(|_| self.complex()).collect()
    }

    /// Column-major fill, so column `j` is drawn before column `j + 1`.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> DMatrix<C64> {
        DMatrix::from_vec(rows, cols, self.vector(rows * cols))
    }
}
