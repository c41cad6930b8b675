//! Cayley transform of a self-adjoint pencil and the identities built on it:
//! the norm identity for `inf ‖Mx‖_P/‖Nx‖_P` and the distance principle.

use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_definite_eigs, lu_factor, pencil_eigs_oracle, vector, DenseMatrix, InnerProduct, C64};
use crate::pencil::Pencil;
use crate::quotients::check_self_adjoint;
use crate::random;

const SELF_ADJOINT_TOL: f64 = 1e-8;
const I: C64 = C64::new(0.0, 1.0);

/// `U = (M + iN)(M − iN)⁻¹` and `T = N(M − iN)⁻¹`.
#[derive(Debug, Clone)]
pub struct CayleyData {
    pub u: DenseMatrix,
    pub t: DenseMatrix,
}

impl CayleyData {
    /// Fails with [`Error::SingularShift`] when `M − iN` is singular.
    pub fn new(pencil: &Pencil) -> Result<Self> {
        let minus = pencil.m().add_scaled(-I, pencil.n());
        let inv = match lu_factor(&minus) {
            Ok(f) => f.inverse(),
            Err(Error::ExactlySingular { .. }) => return Err(Error::SingularShift),
            Err(e) => return Err(e),
        };
        let plus = pencil.m().add_scaled(I, pencil.n());
        Ok(Self { u: plus.matmul(&inv), t: pencil.n().matmul(&inv) })
    }

    /// Largest `|‖Ux‖_P/‖x‖_P − 1|` over `samples` seeded complex Gaussian `x`.
    pub fn unitarity_defect(&self, p: &InnerProduct, samples: usize, seed: u64) -> f64 {
        let mut rng = random::seeded(seed);
        (0..samples)
            .map(|_| {
                let x = random::complex_gaussian_vec(&mut rng, self.u.rows());
                (p.norm(&self.u.matvec(&x)) / p.norm(&x) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `‖T‖_P`, the square root of the top eigenvalue of `(TᴴPT, P)`.
    pub fn t_norm(&self, p: &InnerProduct) -> Result<f64> {
        let e = hermitian_definite_eigs(&p.gram(&self.t, &self.t), &p.to_dense())?;
        Ok(e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
    }
}

fn require_self_adjoint(pencil: &Pencil, p: &InnerProduct) -> Result<()> {
    let check = check_self_adjoint(pencil, p, SELF_ADJOINT_TOL);
    if check.passed {
        Ok(())
    } else {
        Err(Error::NotSelfAdjoint { residual: check.residual })
    }
}

/// `min ‖Ax‖_P/‖Nx‖_P` as the square root of the smallest eigenvalue of
/// `(AᴴPA, NᴴPN)`.
fn min_ratio(a: &DenseMatrix, n: &DenseMatrix, p: &InnerProduct) -> Result<f64> {
    let e = hermitian_definite_eigs(&p.gram(a, a), &p.gram(n, n))?;
    Ok(e.values[0].max(0.0).sqrt())
}

/// `(min ‖Mx‖_P/‖Nx‖_P, √(1/‖T‖²_P − 1))`.
pub fn cayley_norm_identity(pencil: &Pencil, p: &InnerProduct) -> Result<(f64, f64)> {
    require_self_adjoint(pencil, p)?;
    let data = CayleyData::new(pencil)?;
    let lhs = min_ratio(pencil.m(), pencil.n(), p)?;
    let t = data.t_norm(p)?;
    let rhs = (1.0 / (t * t) - 1.0).max(0.0).sqrt();
    Ok((lhs, rhs))
}

/// `(min ‖(M − sN)x‖_P/‖Nx‖_P, min over the oracle spectrum of |λ − s|)`.
pub fn distance_principle(pencil: &Pencil, p: &InnerProduct, s: f64) -> Result<(f64, f64)> {
    require_self_adjoint(pencil, p)?;
    let shifted = pencil.shifted_matrix(C64::new(s, 0.0));
    let inf_value = match min_ratio(&shifted, pencil.n(), p) {
        Err(Error::NotPositiveDefinite { .. }) => return Err(Error::NInKernel),
        r => r?,
    };
    let oracle = pencil_eigs_oracle(pencil, p)?;
    Ok((inf_value, oracle.distance(C64::new(s, 0.0))))
}

/// Largest relative defect of `‖(M ± iN)x‖²_P = ‖Mx‖²_P + ‖Nx‖²_P` over
/// seeded complex Gaussian `x`.
pub fn pythagoras_defect(pencil: &Pencil, p: &InnerProduct, samples: usize, seed: u64) -> f64 {
    let mut rng = random::seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = random::complex_gaussian_vec(&mut rng, pencil.dim());
        let (mx, nx) = (pencil.apply_m(&x), pencil.apply_n(&x));
        let sum = p.norm_sq(&mx) + p.norm_sq(&nx);
        if sum == 0.0 {
            continue;
        }
        for sign in [I, -I] {
            let y: Vec<C64> = vector::combine(C64::new(1.0, 0.0), &mx, sign, &nx);
            worst = worst.max((p.norm_sq(&y) - sum).abs() / sum);
        }
    }
    worst
}
