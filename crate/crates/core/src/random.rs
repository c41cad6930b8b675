//! Seeded Gaussian sampling. Every random quantity in the crate goes through
//! a [`ChaCha8Rng`] built from an explicit `u64` seed.

use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{vector, DenseMatrix, C64};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Real Gaussian entries stored as complex numbers.
pub fn gaussian_vec(rng: &mut Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(normal(rng), 0.0)).collect()
}

/// Independent real and imaginary Gaussian parts.
pub fn complex_gaussian_vec(rng: &mut Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(normal(rng), normal(rng))).collect()
}

pub fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize, complex: bool) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| {
        let re = normal(rng);
        let im = if complex { normal(rng) } else { 0.0 };
        C64::new(re, im)
    })
}

/// Unitary (orthogonal when `complex` is false) factor of a Gaussian matrix,
/// by modified Gram-Schmidt with one reorthogonalization pass.
pub fn random_unitary(rng: &mut Rng, n: usize, complex: bool) -> DenseMatrix {
    let mut cols = gaussian_matrix(rng, n, n, complex).columns();
    for j in 0..n {
        let (done, rest) = cols.split_at_mut(j);
        let c = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let r = vector::inner(c, q);
                vector::axpy(-r, q, c);
            }
        }
        let nrm = vector::norm(c);
        vector::scale(c, C64::new(1.0 / nrm, 0.0));
    }
    DenseMatrix::from_columns(&cols)
}

pub fn uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    rand::Rng::random_range(rng, lo..hi)
}
