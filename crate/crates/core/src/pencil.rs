//! The pair `(M, N)` of the problem `Mx = λNx`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, C64};

const FLAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Pencil {
    m: DenseMatrix,
    n: DenseMatrix,
    flags: PencilFlags,
}

/// Structural facts detected at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PencilFlags {
    pub m_hermitian: bool,
    pub n_hermitian: bool,
    pub n_identity: bool,
}

impl Pencil {
    pub fn new(m: DenseMatrix, n: DenseMatrix) -> Result<Self> {
        let dim = m.require_square()?;
        let dn = n.require_square()?;
        if dn != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: dn });
        }
        let flags = PencilFlags {
            m_hermitian: m.is_hermitian(FLAG_TOL),
            n_hermitian: n.is_hermitian(FLAG_TOL),
            n_identity: n == DenseMatrix::identity(dim),
        };
        Ok(Self { m, n, flags })
    }

    /// The standard problem `(M, I)`.
    pub fn standard(m: DenseMatrix) -> Result<Self> {
        let n = DenseMatrix::identity(m.rows());
        Self::new(m, n)
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn m(&self) -> &DenseMatrix {
        &self.m
    }

    pub fn n(&self) -> &DenseMatrix {
        &self.n
    }

    pub fn flags(&self) -> PencilFlags {
        self.flags
    }

    pub fn apply_m(&self, x: &[C64]) -> Vec<C64> {
        self.m.matvec(x)
    }

    pub fn apply_n(&self, x: &[C64]) -> Vec<C64> {
        if self.flags.n_identity {
            x.to_vec()
        } else {
            self.n.matvec(x)
        }
    }

    /// `M − μN`
    pub fn shifted_matrix(&self, mu: C64) -> DenseMatrix {
        self.m.add_scaled(-mu, &self.n)
    }

    /// `(M − μN, N)`
    pub fn shifted(&self, mu: C64) -> Pencil {
        let mut flags = self.flags;
        flags.m_hermitian = flags.m_hermitian && flags.n_hermitian && mu.im == 0.0;
        Pencil { m: self.shifted_matrix(mu), n: self.n.clone(), flags }
    }

    /// `(N, M)`
    pub fn swapped(&self) -> Pencil {
        let m = self.n.clone();
        let n = self.m.clone();
        let n_identity = n == DenseMatrix::identity(self.dim());
        Pencil { m, n, flags: PencilFlags { m_hermitian: self.flags.n_hermitian, n_hermitian: self.flags.m_hermitian, n_identity } }
    }

    pub fn into_parts(self) -> (DenseMatrix, DenseMatrix) {
        (self.m, self.n)
    }
}
