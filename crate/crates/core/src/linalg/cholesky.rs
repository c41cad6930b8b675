use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float as _;

use super::{DenseMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Lower-triangular `L` with `A = L·Lᴴ`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: DenseMatrix,
}

const HERMITIAN_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-14;

/// Dense Cholesky factorization of a Hermitian positive definite matrix.
///
/// Only the lower triangle of `a` is read once the Hermitian check passes. A
/// pivot at or below `1e-14·max diag(A)` is reported as
/// [`Error::NotPositiveDefinite`].
pub fn cholesky_spd(a: &DenseMatrix) -> Result<CholeskyFactor> {
    let n = a.require_square()?;
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let max_diag = (0..n).map(|i| a[(i, i)].re).fold(0.0, f64::max);
    let threshold = PIVOT_TOL * max_diag;
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let (upper, lower) = split_rows(&mut l, j);
        let (row_j, diag) = upper.split_at_mut(j);
        let row_j = &*row_j;
        let d = a[(j, j)].re - row_j.iter().map(|v| v.norm_sqr()).sum::<f64>();
        if !(d > threshold) || max_diag <= 0.0 {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let ljj = d.sqrt();
        diag[0] = C64::new(ljj, 0.0);
        let inv = 1.0 / ljj;
        for (offset, row_i) in lower.chunks_exact_mut(n).enumerate() {
            let i = j + 1 + offset;
            let s = row_i[..j].iter().zip(row_j).fold(ZERO, |acc, (x, y)| acc + x * y.conj());
            row_i[j] = (a[(i, j)] - s) * inv;
        }
    }
    Ok(CholeskyFactor { l })
}

/// Row `j` of `l` and all rows below it, as disjoint slices.
fn split_rows(l: &mut DenseMatrix, j: usize) -> (&mut [C64], &mut [C64]) {
    let n = l.cols();
    let data = l.data_mut();
    let (_, rest) = data.split_at_mut(j * n);
    let (row_j, below) = rest.split_at_mut(n);
    (row_j, below)
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn lower(&self) -> &DenseMatrix {
        &self.l
    }

    /// Solves `L·y = b`.
    pub fn solve_lower(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "dimension mismatch");
        let mut y = b.to_vec();
        for i in 0..n {
            let row = self.l.row(i);
            let s = row[..i].iter().zip(&y[..i]).fold(ZERO, |acc, (a, x)| acc + a * x);
            y[i] = (y[i] - s) / row[i];
        }
        y
    }

    /// Solves `Lᴴ·x = y`.
    pub fn solve_lower_adjoint(&self, y: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(y.len(), n, "dimension mismatch");
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let row = self.l.row(i);
            x[i] /= row[i].conj();
            let xi = x[i];
            for (xk, lik) in x[..i].iter_mut().zip(&row[..i]) {
                *xk -= lik.conj() * xi;
            }
        }
        x
    }

    /// Solves `A·x = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        self.solve_lower_adjoint(&self.solve_lower(b))
    }

    /// `A·x = L·(Lᴴ·x)`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.l.matvec(&self.l.adjoint_matvec(x))
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.l.matmul(&self.l.adjoint())
    }

    /// Dense inverse, column by column. Desk scale only.
    pub fn inverse(&self) -> DenseMatrix {
        let n = self.dim();
        let cols: Vec<Vec<C64>> = (0..n).map(|j| self.solve(&super::vector::unit(n, j))).collect();
        DenseMatrix::from_columns(&cols).hermitian_part()
    }
}
