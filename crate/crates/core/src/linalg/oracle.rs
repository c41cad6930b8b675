//! Reference spectra for desk-scale self-adjoint pencils.
//!
//! The pencil `Mx = λNx` is reduced to the Hermitian-definite pair
//! `(NᴴPM, NᴴPN)`, then to a Hermitian matrix by Cholesky congruence, and
//! diagonalized by Jacobi rotations. Nothing here depends on the iteration code.

use alloc::vec::Vec;

use super::{cholesky_spd, hermitian_eigs, DenseMatrix, HermitianEigen, InnerProduct, C64};
use crate::error::{Error, Result};
use crate::pencil::Pencil;

/// Relative Hermitian defect of `NᴴPM` above which the pencil is rejected.
const SELF_ADJOINT_TOL: f64 = 1e-8;
/// `|1 − bλ'|` below this marks an infinite eigenvalue after substitution.
const INFINITE_TOL: f64 = 1e-9;

/// Full spectrum of a self-adjoint pencil.
#[derive(Debug, Clone)]
pub struct SpectrumOracle {
    /// Real, ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns `vᵢ` with `(Nvᵢ, Nvⱼ)_P = δᵢⱼ`.
    pub eigenvectors: DenseMatrix,
    /// The substitution used when `N` itself was singular.
    pub substitution: Option<Substitution>,
    /// Infinite eigenvalues (kernel of `N`) dropped after substitution.
    pub dropped_infinite: usize,
}

/// How a singular `N` was replaced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Substitution {
    /// `N ← N + b·M`
    Shifted { b: f64 },
    /// Roles of `M` and `N` interchanged.
    Swapped,
}

impl SpectrumOracle {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.column(i)
    }

    /// Index of and distance to the eigenvalue nearest `s`.
    pub fn nearest(&self, s: C64) -> Option<(usize, f64)> {
        self.eigenvalues.iter().enumerate().map(|(i, &l)| (i, (C64::new(l, 0.0) - s).norm())).min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn distance(&self, s: C64) -> f64 {
        self.nearest(s).map_or(f64::INFINITY, |(_, d)| d)
    }
}

/// Solves `H·v = λ·G·v` for Hermitian `H` and SPD `G`, returning
/// `G`-orthonormal eigenvectors.
pub fn hermitian_definite_eigs(h: &DenseMatrix, g: &DenseMatrix) -> Result<HermitianEigen> {
    let l = cholesky_spd(g)?;
    let n = h.rows();
    let y: Vec<Vec<C64>> = h.columns().iter().map(|c| l.solve_lower(c)).collect();
    let y = DenseMatrix::from_columns(&y).adjoint();
    let c: Vec<Vec<C64>> = y.columns().iter().map(|c| l.solve_lower(c)).collect();
    let c = DenseMatrix::from_columns(&c).hermitian_part();
    let e = hermitian_eigs(&c)?;
    let v: Vec<Vec<C64>> = (0..n).map(|i| l.solve_lower_adjoint(&e.vector(i))).collect();
    Ok(HermitianEigen { values: e.values, vectors: DenseMatrix::from_columns(&v) })
}

/// Oracle spectrum of a pencil that is self-adjoint with respect to `P`.
///
/// When `NᴴPN` is not positive definite the pencil `(M, N + bM)` is tried for
/// `b = ±1` and a few multiples of `‖N‖/‖M‖`, then `(N, M)`; eigenvalues are
/// mapped back and infinite ones dropped.
pub fn pencil_eigs_oracle(pencil: &Pencil, p: &InnerProduct) -> Result<SpectrumOracle> {
    if p.dim() != pencil.dim() {
        return Err(Error::DimensionMismatch { expected: pencil.dim(), found: p.dim() });
    }
    let (m, n) = (pencil.m(), pencil.n());
    let pm = p.apply_matrix(m);
    let h = n.adjoint().matmul(&pm);
    let residual = h.hermitian_defect();
    if residual > SELF_ADJOINT_TOL {
        return Err(Error::NotSelfAdjoint { residual });
    }
    let h = h.hermitian_part();
    let g = p.gram(n, n).hermitian_part();
    if let Ok(e) = hermitian_definite_eigs(&h, &g) {
        return Ok(SpectrumOracle { eigenvalues: e.values, eigenvectors: e.vectors, substitution: None, dropped_infinite: 0 });
    }

    let f = m.adjoint().matmul(&pm).hermitian_part();
    let hh = h.add_scaled(C64::new(1.0, 0.0), &h.adjoint());
    let mnorm = m.frobenius_norm();
    if mnorm == 0.0 {
        return Err(Error::SingularPencilFamily);
    }
    let s = n.frobenius_norm() / mnorm;
    let mut probes: Vec<f64> = alloc::vec![1.0, -1.0];
    probes.extend([0.5, -0.5, 0.1, -0.1, 0.013, 2.0].iter().map(|k| k * s).filter(|b| *b != 0.0));
    for b in probes {
        let gb = g.add_scaled(C64::new(b, 0.0), &hh).add_scaled(C64::new(b * b, 0.0), &f).hermitian_part();
        let hb = h.add_scaled(C64::new(b, 0.0), &f).hermitian_part();
        if let Ok(e) = hermitian_definite_eigs(&hb, &gb) {
            let mapped = e.values.iter().map(|&lp| {
                let d = 1.0 - b * lp;
                (d.abs() > INFINITE_TOL * (1.0 + (b * lp).abs())).then(|| lp / d)
            });
            return Ok(finish(pencil, p, mapped, &e.vectors, Substitution::Shifted { b }));
        }
    }
    if let Ok(e) = hermitian_definite_eigs(&h.adjoint().hermitian_part(), &f) {
        let scale = e.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mapped = e.values.iter().map(|&nu| (nu.abs() > INFINITE_TOL * scale.max(1.0)).then(|| 1.0 / nu));
        return Ok(finish(pencil, p, mapped, &e.vectors, Substitution::Swapped));
    }
    Err(Error::SingularPencilFamily)
}

/// Keeps the finite mapped eigenvalues, renormalizes to `‖Nv‖_P = 1` and sorts.
fn finish(
    pencil: &Pencil,
    p: &InnerProduct,
    mapped: impl Iterator<Item = Option<f64>>,
    vectors: &DenseMatrix,
    substitution: Substitution,
) -> SpectrumOracle {
    let mut pairs: Vec<(f64, Vec<C64>)> = Vec::new();
    let mut dropped = 0;
    for (i, lam) in mapped.enumerate() {
        let Some(lam) = lam else {
            dropped += 1;
            continue;
        };
        let mut v = vectors.column(i);
        let nv = p.norm(&pencil.apply_n(&v));
        if nv > 0.0 {
            super::vector::scale(&mut v, C64::new(1.0 / nv, 0.0));
        }
        pairs.push((lam, v));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eigenvalues = pairs.iter().map(|(l, _)| *l).collect();
    let cols: Vec<Vec<C64>> = pairs.into_iter().map(|(_, v)| v).collect();
    let eigenvectors = if cols.is_empty() { DenseMatrix::zeros(pencil.dim(), 0) } else { DenseMatrix::from_columns(&cols) };
    SpectrumOracle { eigenvalues, eigenvectors, substitution: Some(substitution), dropped_infinite: dropped }
}
