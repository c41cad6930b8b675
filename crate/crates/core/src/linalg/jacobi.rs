use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float as _;

use super::{vector, DenseMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;
const HERMITIAN_TOL: f64 = 1e-10;

/// Ascending eigenvalues with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }
}

/// Cyclic complex Jacobi. Each rotation first rotates the phase of `a_pq`
/// away, then applies a real plane rotation.
pub fn hermitian_eigs(a: &DenseMatrix) -> Result<HermitianEigen> {
    let n = a.require_square()?;
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let mut a = a.hermitian_part();
    let mut v = DenseMatrix::identity(n);
    let frob = a.frobenius_norm();
    if frob == 0.0 {
        return Ok(sorted(a.diag().iter().map(|d| d.re).collect(), v));
    }
    let floor = f64::MIN_POSITIVE.max(1e-300 * frob);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if b <= floor || b <= 1e-17 * (app * aqq).abs().sqrt() {
                    continue;
                }
                rotated = true;
                let e = apq / b;
                let theta = (aqq - app) / (2.0 * b);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s, e.conj());
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(app - t * b, 0.0);
                a[(q, q)] = C64::new(aqq + t * b, 0.0);
            }
        }
        if !rotated {
            break;
        }
    }
    Ok(sorted(a.diag().iter().map(|d| d.re).collect(), v))
}

/// Applies `J = diag(1, e)·[[c, s], [−s, c]]` in the `(p, q)` plane:
/// `A ← JᴴAJ`, `V ← VJ`.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64, e: C64) {
    let n = a.rows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * c - akq * e * s;
        a[(k, q)] = akp * s + akq * e * c;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * c - vkq * e * s;
        v[(k, q)] = vkp * s + vkq * e * c;
    }
    let ec = e.conj();
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = apk * c - aqk * ec * s;
        a[(q, k)] = apk * s + aqk * ec * c;
    }
}

fn sorted(values: Vec<f64>, vectors: DenseMatrix) -> HermitianEigen {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let cols: Vec<Vec<C64>> = order.iter().map(|&j| vectors.column(j)).collect();
    HermitianEigen { values: order.iter().map(|&i| values[i]).collect(), vectors: DenseMatrix::from_columns(&cols) }
}

/// Singular values in descending order by one-sided (Hestenes) Jacobi, which
/// keeps small singular values accurate relative to the column scaling.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    let mut cols = if a.rows() >= a.cols() { a.columns() } else { a.adjoint().columns() };
    let k = cols.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = vector::norm_sq(&cols[p]);
                let beta = vector::norm_sq(&cols[q]);
                let gamma = vector::inner(&cols[q], &cols[p]);
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-16 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let e = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (head, tail) = cols.split_at_mut(q);
                let (cp, cq) = (&mut head[p], &mut tail[0]);
                for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (u, w) = (*xp, *xq);
                    *xp = u * c - w * e * s;
                    *xq = u * s + w * e * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = cols.iter().map(|c| vector::norm(c)).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}
