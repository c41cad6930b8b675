use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float as _;

use super::{cholesky_spd, vector, CholeskyFactor, DenseMatrix, C64};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;

/// A positive definite `P` defining `(x, y)_P = yᴴPx`.
#[derive(Debug, Clone)]
pub struct InnerProduct {
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Identity(usize),
    /// `P` given explicitly, with its factor kept for `P⁻¹`.
    Explicit {
        p: DenseMatrix,
        factor: CholeskyFactor,
    },
    /// `P = A⁻¹`, applied through the Cholesky factor of `A`.
    InverseOf(CholeskyFactor),
}

impl InnerProduct {
    pub fn identity(n: usize) -> Self {
        Self { kind: Kind::Identity(n) }
    }

    /// Explicit SPD `P`. Positive definiteness is established by factoring.
    pub fn explicit(p: DenseMatrix) -> Result<Self> {
        let factor = factor_checked(&p)?;
        Ok(Self { kind: Kind::Explicit { p, factor } })
    }

    /// `P = A⁻¹` for SPD `A`; the inverse is never formed.
    pub fn inverse_of(a: &DenseMatrix) -> Result<Self> {
        Ok(Self::inverse_of_factor(factor_checked(a)?))
    }

    pub fn inverse_of_factor(factor: CholeskyFactor) -> Self {
        Self { kind: Kind::InverseOf(factor) }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Identity(n) => *n,
            Kind::Explicit { p, .. } => p.rows(),
            Kind::InverseOf(f) => f.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Identity(_) => "identity",
            Kind::Explicit { .. } => "explicit",
            Kind::InverseOf(_) => "inverse-of-spd",
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, Kind::Identity(_))
    }

    /// `P·x`
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim(), "inner product dimension mismatch");
        match &self.kind {
            Kind::Identity(_) => x.to_vec(),
            Kind::Explicit { p, .. } => p.matvec(x),
            Kind::InverseOf(f) => f.solve(x),
        }
    }

    /// `P⁻¹·x`
    pub fn apply_inverse(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim(), "inner product dimension mismatch");
        match &self.kind {
            Kind::Identity(_) => x.to_vec(),
            Kind::Explicit { factor, .. } => factor.solve(x),
            Kind::InverseOf(f) => f.apply(x),
        }
    }

    /// `(x, y)_P = yᴴPx`. Panics on dimension mismatch; see [`p_inner`].
    pub fn inner(&self, x: &[C64], y: &[C64]) -> C64 {
        vector::inner(&self.apply(x), y)
    }

    pub fn norm_sq(&self, x: &[C64]) -> f64 {
        self.inner(x, x).re.max(0.0)
    }

    pub fn norm(&self, x: &[C64]) -> f64 {
        self.norm_sq(x).sqrt()
    }

    /// `P·A`, column by column.
    pub fn apply_matrix(&self, a: &DenseMatrix) -> DenseMatrix {
        if self.is_identity() {
            return a.clone();
        }
        let cols: Vec<Vec<C64>> = a.columns().iter().map(|c| self.apply(c)).collect();
        DenseMatrix::from_columns(&cols)
    }

    /// `Aᴴ·P·B`
    pub fn gram(&self, a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        a.adjoint().matmul(&self.apply_matrix(b))
    }

    /// Dense `P`. Desk scale only.
    pub fn to_dense(&self) -> DenseMatrix {
        match &self.kind {
            Kind::Identity(n) => DenseMatrix::identity(*n),
            Kind::Explicit { p, .. } => p.clone(),
            Kind::InverseOf(f) => f.inverse(),
        }
    }
}

fn factor_checked(a: &DenseMatrix) -> Result<CholeskyFactor> {
    a.require_square()?;
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    cholesky_spd(&a.hermitian_part())
}

/// `(x, y)_P` with dimension checking.
pub fn p_inner(p: &InnerProduct, x: &[C64], y: &[C64]) -> Result<C64> {
    let n = p.dim();
    for len in [x.len(), y.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    Ok(p.inner(x, y))
}

/// `P = (X·Xᴴ)⁻¹`, the inner product in which `M = XΛX⁻¹` is normal.
pub fn normalizing_inner_product(x: &DenseMatrix) -> Result<InnerProduct> {
    x.require_square()?;
    let xxh = x.matmul(&x.adjoint()).hermitian_part();
    let factor = cholesky_spd(&xxh).map_err(|e| match e {
        Error::NotPositiveDefinite { index, .. } => Error::ExactlySingular { index },
        other => other,
    })?;
    Ok(InnerProduct::inverse_of_factor(factor))
}

/// The `P`-adjoint `S* = P⁻¹·Sᴴ·P`, dense.
pub fn p_adjoint(p: &InnerProduct, s: &DenseMatrix) -> DenseMatrix {
    let shp = s.adjoint().matmul(&p.apply_matrix(&DenseMatrix::identity(s.rows())));
    let cols: Vec<Vec<C64>> = shp.columns().iter().map(|c| p.apply_inverse(c)).collect();
    DenseMatrix::from_columns(&cols)
}

/// `‖S·S* − S*·S‖_F / (‖S‖_F·‖S*‖_F)`, zero exactly when `S` is `P`-normal.
pub fn normality_defect(p: &InnerProduct, s: &DenseMatrix) -> f64 {
    let sa = p_adjoint(p, s);
    let scale = s.frobenius_norm() * sa.frobenius_norm();
    if scale == 0.0 {
        return 0.0;
    }
    s.matmul(&sa).sub(&sa.matmul(s)).frobenius_norm() / scale
}
