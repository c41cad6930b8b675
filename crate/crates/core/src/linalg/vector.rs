//! Euclidean vector kernels on `&[C64]`.
//!
//! The inner product convention is `(x, y) = yᴴx`, linear in the first slot.

use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float as _;

use super::{C64, ZERO};

/// `(x, y) = Σ xᵢ·conj(yᵢ)`.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a * b.conj())
}

pub fn norm_sq(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    norm_sq(x).sqrt()
}

pub fn max_abs(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `y += alpha·x`
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(x: &mut [C64], s: C64) {
    for v in x.iter_mut() {
        *v *= s;
    }
}

pub fn scaled(x: &[C64], s: C64) -> Vec<C64> {
    x.iter().map(|v| v * s).collect()
}

pub fn sub(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn add(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

/// `a·x + b·y`
pub fn combine(a: C64, x: &[C64], b: C64, y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

pub fn from_real(x: &[f64]) -> Vec<C64> {
    x.iter().map(|&v| C64::new(v, 0.0)).collect()
}

pub fn unit(n: usize, i: usize) -> Vec<C64> {
    let mut e = alloc::vec![ZERO; n];
    e[i] = C64::new(1.0, 0.0);
    e
}

/// Unit-modulus phase `z/|z|`, or `None` for `z = 0`.
pub fn phase(z: C64) -> Option<C64> {
    let r = z.norm();
    if r == 0.0 || !r.is_finite() {
        None
    } else {
        Some(z / r)
    }
}
