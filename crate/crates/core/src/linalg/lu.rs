use alloc::vec::Vec;

use super::{DenseMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Pivots with magnitude below this are treated as exact zeros.
const SINGULAR_PIVOT: f64 = 1e-300;
/// Pivot-ratio below which a solve is flagged as nearly singular.
const NEAR_SINGULAR_RCOND: f64 = 1e-13;

/// Partially pivoted `P·A = L·U`, stored packed: unit-lower `L` strictly below
/// the diagonal and `U` on and above it.
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: DenseMatrix,
    /// `perm[i]` is the row of `A` that ended up in row `i`.
    perm: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

#[derive(Debug, Clone)]
pub struct LuSolution {
    pub x: Vec<C64>,
    /// Ratio of the smallest to the largest pivot magnitude.
    pub rcond_estimate: f64,
    pub near_singular: bool,
}

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactor> {
    let n = a.require_square()?;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut min_pivot = f64::INFINITY;
    let mut max_pivot = 0.0f64;
    for k in 0..n {
        let (p, mag) = (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(mag >= SINGULAR_PIVOT) {
            return Err(Error::ExactlySingular { index: k });
        }
        min_pivot = min_pivot.min(mag);
        max_pivot = max_pivot.max(mag);
        if p != k {
            perm.swap(p, k);
            let data = lu.data_mut();
            for j in 0..n {
                data.swap(k * n + j, p * n + j);
            }
        }
        let data = lu.data_mut();
        let (head, tail) = data.split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n..];
        let inv = C64::new(1.0, 0.0) / pivot_row[k];
        for row in tail.chunks_exact_mut(n) {
            let factor = row[k] * inv;
            row[k] = factor;
            if factor == ZERO {
                continue;
            }
            for (r, u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                *r -= factor * u;
            }
        }
    }
    Ok(LuFactor { lu, perm, min_pivot, max_pivot })
}

/// One-shot `A·x = b`. Near-singular systems still return the computed
/// solution, with [`LuSolution::near_singular`] set.
pub fn lu_solve(a: &DenseMatrix, b: &[C64]) -> Result<LuSolution> {
    let f = lu_factor(a)?;
    if b.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: b.len() });
    }
    let x = f.solve(b);
    Ok(LuSolution { x, rcond_estimate: f.rcond_estimate(), near_singular: f.near_singular() })
}

impl LuFactor {
    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn rcond_estimate(&self) -> f64 {
        if self.max_pivot == 0.0 {
            1.0
        } else {
            self.min_pivot / self.max_pivot
        }
    }

    pub fn near_singular(&self) -> bool {
        self.rcond_estimate() < NEAR_SINGULAR_RCOND
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "dimension mismatch");
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s = row[..i].iter().zip(&y[..i]).fold(ZERO, |acc, (l, v)| acc + l * v);
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s = row[i + 1..].iter().zip(&y[i + 1..]).fold(ZERO, |acc, (u, v)| acc + u * v);
            y[i] = (y[i] - s) / row[i];
        }
        y
    }

    /// Solves `Aᴴ·x = b`.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "dimension mismatch");
        // Uᴴ·w = b
        let mut w = b.to_vec();
        for j in 0..n {
            let row = self.lu.row(j);
            w[j] /= row[j].conj();
            let wj = w[j];
            for (wi, u) in w[j + 1..].iter_mut().zip(&row[j + 1..]) {
                *wi -= u.conj() * wj;
            }
        }
        // Lᴴ·u = w
        for j in (0..n).rev() {
            let row = self.lu.row(j);
            let uj = w[j];
            for (wi, l) in w[..j].iter_mut().zip(&row[..j]) {
                *wi -= l.conj() * uj;
            }
        }
        let mut x = alloc::vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }

    /// Dense inverse. Desk scale only.
    pub fn inverse(&self) -> DenseMatrix {
        let n = self.dim();
        let cols: Vec<Vec<C64>> = (0..n).map(|j| self.solve(&super::vector::unit(n, j))).collect();
        DenseMatrix::from_columns(&cols)
    }

    /// `P·A` reassembled from the factors, for residual checks.
    pub fn reconstruct_permuted(&self) -> DenseMatrix {
        let n = self.dim();
        let l = DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            core::cmp::Ordering::Greater => self.lu[(i, j)],
            core::cmp::Ordering::Equal => C64::new(1.0, 0.0),
            core::cmp::Ordering::Less => ZERO,
        });
        let u = DenseMatrix::from_fn(n, n, |i, j| if i <= j { self.lu[(i, j)] } else { ZERO });
        l.matmul(&u)
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }
}
