//! Dense complex linear algebra at desk scale.
//!
//! Everything here is deliberately independent of the quotient machinery so
//! that the [`oracle`] can be used to check it.

mod cholesky;
mod inner;
mod jacobi;
mod lu;
mod matrix;
pub mod oracle;
pub mod vector;

pub use cholesky::{cholesky_spd, CholeskyFactor};
pub use inner::{normality_defect, normalizing_inner_product, p_adjoint, p_inner, InnerProduct};
pub use jacobi::{hermitian_eigs, singular_values, HermitianEigen};
pub use lu::{lu_factor, lu_solve, LuFactor, LuSolution};
pub use matrix::DenseMatrix;
pub use oracle::{hermitian_definite_eigs, pencil_eigs_oracle, SpectrumOracle};

pub type C64 = num_complex::Complex<f64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
