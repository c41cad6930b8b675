//! Pointwise eigenvalue estimates at a fixed vector `x`.
//!
//! With `v = Mx`, `w = Nx` and the `P`-inner product:
//!
//! * `rq = (v, w)_P / (w, w)_P`
//! * `oq = phase((v, w)_P)·‖v‖_P / ‖w‖_P`
//! * `qf(μ) = oq(M − μN, N)(x) + μ`
//!
//! The image of `qf` is the disc about `rq` of radius `‖v − rq·w‖_P / ‖w‖_P`.

use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigs, vector, DenseMatrix, InnerProduct, C64};
use crate::pencil::Pencil;
use crate::random;

/// Below this `‖Nx‖_P` counts as zero.
const N_KERNEL_TOL: f64 = 1e-300;
/// Relative half-width of the band around `rq` where `qf` is not evaluated.
const DISCONTINUITY_BAND: f64 = 1e-12;

/// Everything the quotients need from one pair of products `Mx`, `Nx`.
#[derive(Debug, Clone)]
pub struct Moments {
    pub mx: Vec<C64>,
    pub nx: Vec<C64>,
    /// `‖Mx‖²_P`
    pub vv: f64,
    /// `‖Nx‖²_P`
    pub ww: f64,
    /// `(Mx, Nx)_P`
    pub vw: C64,
    pub rq: C64,
    /// `‖Mx − rq·Nx‖_P / ‖Nx‖_P`
    pub radius: f64,
}

impl Moments {
    pub fn new(pencil: &Pencil, p: &InnerProduct, x: &[C64]) -> Result<Self> {
        check_dim(pencil, p, x)?;
        Self::from_products(p, pencil.apply_m(x), pencil.apply_n(x))
    }

    /// From precomputed `Mx` and `Nx`.
    pub fn from_products(p: &InnerProduct, mx: Vec<C64>, nx: Vec<C64>) -> Result<Self> {
        let pv = p.apply(&mx);
        let pw = p.apply(&nx);
        let ww = vector::inner(&pw, &nx).re;
        if !(ww.max(0.0).sqrt() > N_KERNEL_TOL) {
            return Err(Error::NInKernel);
        }
        let vv = vector::inner(&pv, &mx).re.max(0.0);
        // (v, w)_P = wᴴPv
        let vw = vector::inner(&pv, &nx);
        let rq = vw / ww;
        let r = vector::combine(C64::new(1.0, 0.0), &mx, -rq, &nx);
        let pr = vector::combine(C64::new(1.0, 0.0), &pv, -rq, &pw);
        let radius = (vector::inner(&pr, &r).re.max(0.0) / ww).sqrt();
        Ok(Self { mx, nx, vv, ww, vw, rq, radius })
    }

    pub fn optimal_quotient(&self) -> Result<C64> {
        let ph = vector::phase(self.vw).ok_or(Error::PhaseUndefined)?;
        Ok(ph * (self.vv / self.ww).sqrt())
    }

    /// `qf(μ)` by the closed form
    /// `rq − phase(μ̂)·r² / (√(r² + |μ̂|²) + |μ̂|)`, `μ̂ = μ − rq`.
    pub fn quotient_function(&self, mu: C64) -> Result<C64> {
        let hat = mu - self.rq;
        let m = hat.norm();
        if m <= DISCONTINUITY_BAND * (1.0 + self.rq.norm()) {
            return Err(Error::AtDiscontinuity { mu: mu.re, rq: self.rq.re });
        }
        let r2 = self.radius * self.radius;
        Ok(self.rq - (hat / m) * (r2 / ((r2 + m * m).sqrt() + m)))
    }

    /// `(left, right, at_infinity)` limits of `qf` at `rq`.
    pub fn limits(&self) -> (C64, C64, C64) {
        let r = C64::new(self.radius, 0.0);
        (self.rq + r, self.rq - r, self.rq)
    }

    pub fn lepo_bound(&self, mu: C64) -> f64 {
        let oq2 = self.vv / self.ww;
        let rq2 = self.rq.norm_sqr();
        let radicand = (self.rq - mu).norm_sqr() + oq2 - rq2;
        if radicand < 0.0 {
            log::warn!("distance bound radicand {radicand:e} clamped at zero");
            0.0
        } else {
            radicand.sqrt()
        }
    }
}

fn check_dim(pencil: &Pencil, p: &InnerProduct, x: &[C64]) -> Result<()> {
    let n = pencil.dim();
    for found in [p.dim(), x.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    Ok(())
}

pub fn rayleigh_quotient(pencil: &Pencil, p: &InnerProduct, x: &[C64]) -> Result<C64> {
    Ok(Moments::new(pencil, p, x)?.rq)
}

pub fn optimal_quotient(pencil: &Pencil, p: &InnerProduct, x: &[C64]) -> Result<C64> {
    Moments::new(pencil, p, x)?.optimal_quotient()
}

pub fn quotient_function(pencil: &Pencil, p: &InnerProduct, x: &[C64], mu: C64) -> Result<C64> {
    Moments::new(pencil, p, x)?.quotient_function(mu)
}

/// `(center, radius)` of the image of the quotient function.
pub fn image_disc(pencil: &Pencil, p: &InnerProduct, x: &[C64]) -> Result<(C64, f64)> {
    let m = Moments::new(pencil, p, x)?;
    Ok((m.rq, m.radius))
}

/// `(left, right, at_infinity)`; all three coincide for an eigenvector.
pub fn quotient_limits(pencil: &Pencil, p: &InnerProduct, x: &[C64]) -> Result<(C64, C64, C64)> {
    Ok(Moments::new(pencil, p, x)?.limits())
}

/// Upper bound on `dist(μ, Λ(M, N))` for normal problems.
pub fn lepo_bound(pencil: &Pencil, p: &InnerProduct, x: &[C64], mu: C64) -> Result<f64> {
    Ok(Moments::new(pencil, p, x)?.lepo_bound(mu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfAdjointnessCheck {
    pub residual: f64,
    pub passed: bool,
}

/// Relative Hermitian defect of `NᴴPM`, formed densely.
pub fn check_self_adjoint(pencil: &Pencil, p: &InnerProduct, tol: f64) -> SelfAdjointnessCheck {
    let h = pencil.n().adjoint().matmul(&p.apply_matrix(pencil.m()));
    let residual = h.hermitian_defect();
    SelfAdjointnessCheck { residual, passed: residual <= tol }
}

/// Matrix-free variant for large pencils: the largest
/// `|Im (Mx, Nx)_P| / (‖Mx‖_P‖Nx‖_P)` over `samples` seeded random `x`.
pub fn check_self_adjoint_sampled(pencil: &Pencil, p: &InnerProduct, tol: f64, samples: usize, seed: u64) -> SelfAdjointnessCheck {
    let mut rng = random::seeded(seed);
    let mut residual = 0.0f64;
    for _ in 0..samples {
        let x = random::complex_gaussian_vec(&mut rng, pencil.dim());
        let (mx, nx) = (pencil.apply_m(&x), pencil.apply_n(&x));
        let scale = p.norm(&mx) * p.norm(&nx);
        if scale > 0.0 {
            residual = residual.max(p.inner(&mx, &nx).im.abs() / scale);
        }
    }
    SelfAdjointnessCheck { residual, passed: residual <= tol }
}

/// Full set of estimates at `(x, μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientReport {
    pub rq: C64,
    pub oq: C64,
    pub mu: Option<C64>,
    pub qf_value: Option<C64>,
    pub disc_center: C64,
    pub disc_radius: f64,
    /// `[rq − radius, rq + radius]`, present only for self-adjoint pencils.
    pub inclusion_interval: Option<(f64, f64)>,
}

pub fn quotient_report(pencil: &Pencil, p: &InnerProduct, x: &[C64], mu: Option<C64>, self_adjoint: bool) -> Result<QuotientReport> {
    let m = Moments::new(pencil, p, x)?;
    let oq = m.optimal_quotient()?;
    let qf_value = mu.map(|mu| m.quotient_function(mu)).transpose()?;
    Ok(QuotientReport {
        rq: m.rq,
        oq,
        mu,
        qf_value,
        disc_center: m.rq,
        disc_radius: m.radius,
        inclusion_interval: self_adjoint.then_some((m.rq.re - m.radius, m.rq.re + m.radius)),
    })
}

/// One Arnoldi step from `x/‖x‖` for the standard problem: `(h₁₁, h₂₁)`.
pub fn arnoldi_disc_check(m: &DenseMatrix, x: &[C64]) -> Result<(C64, f64)> {
    let nrm = vector::norm(x);
    if nrm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let q = vector::scaled(x, C64::new(1.0 / nrm, 0.0));
    let mq = m.matvec(&q);
    let h11 = vector::inner(&mq, &q);
    let h21 = vector::norm(&vector::combine(C64::new(1.0, 0.0), &mq, -h11, &q));
    Ok((h11, h21))
}

/// `(rq_{M,I}(x), oq_{M^{1/2},I}(x)²)` with the square root taken from the
/// Jacobi eigendecomposition.
pub fn sqrt_identity_check(m_spd: &DenseMatrix, x: &[C64]) -> Result<(f64, f64)> {
    let e = hermitian_eigs(m_spd)?;
    if let Some((index, &pivot)) = e.values.iter().enumerate().find(|(_, &l)| l <= 0.0) {
        return Err(Error::NotPositiveDefinite { index, pivot });
    }
    let n = m_spd.rows();
    let roots: Vec<C64> = e.values.iter().map(|l| C64::new(l.sqrt(), 0.0)).collect();
    let root = e.vectors.matmul(&DenseMatrix::from_diag(&roots)).matmul(&e.vectors.adjoint());
    let ip = InnerProduct::identity(n);
    let rq = rayleigh_quotient(&Pencil::standard(m_spd.clone())?, &ip, x)?;
    let oq = optimal_quotient(&Pencil::standard(root)?, &ip, x)?;
    Ok((rq.re, (oq * oq).re))
}
