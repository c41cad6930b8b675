//! Eigenvalue estimation for self-adjoint generalized eigenvalue problems
//! `Mx = λNx` through the quotient function
//!
//! ```text
//! μ ↦ oq(M − μN, N)(x) + μ
//! ```
//!
//! evaluated in an inner product `(x, y)_P = yᴴPx` for which `NᴴPM` is
//! Hermitian. The crate covers:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`linalg`] | dense complex matrices, factorizations, the P-inner product and a Jacobi-based spectrum oracle |
//! | [`quotients`] | Rayleigh/optimal quotients, the quotient function, its image disc and normality diagnostics |
//! | [`midpoint`] | midpoint-of-spectrum estimation and pencil reformulations |
//! | [`iterations`] | optimal quotient iterations with the σ₂ convergence monitor |
//! | [`descent`] | preconditioned descent for starting vectors, subspace accumulation and deflation |
//! | [`cayley`] | finite-dimensional Cayley-transform identities |
//! | [`generators`] | canonical test problems |
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cayley;
pub mod descent;
pub mod error;
pub mod generators;
pub mod iterations;
pub mod linalg;
pub mod midpoint;
pub mod pencil;
pub mod quotients;
pub mod random;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, InnerProduct, C64};
pub use pencil::Pencil;
