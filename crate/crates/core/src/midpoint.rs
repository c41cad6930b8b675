//! Midpoint-of-spectrum estimates and pencil reformulations.

use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::linalg::{lu_factor, vector, InnerProduct, C64};
use crate::pencil::Pencil;
use crate::quotients::Moments;
use crate::random;

pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MidpointState {
    pub mu: f64,
    pub alpha: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Every `α` in order of computation.
    pub alphas: Vec<f64>,
}

/// Scalar fixed point `α = ‖Mx − μNx‖_P/‖Nx‖_P + μ`, `μ ← α/2`, started at
/// `μ = ‖Mx‖_P / (2‖Nx‖_P)`. Each step is `O(n)` since `P·Mx` and `P·Nx` are
/// computed once.
///
/// Running out of iterations is not an error: the last `α` is returned with
/// `converged = false`.
pub fn midpoint_refine(pencil: &Pencil, p: &InnerProduct, x: &[C64], max_iters: usize, rel_tol: f64) -> Result<MidpointState> {
    refine_from_products(p, &pencil.apply_m(x), &pencil.apply_n(x), max_iters, rel_tol)
}

/// [`midpoint_refine`] for precomputed `v = Mx` and `w = Nx`.
pub fn refine_from_products(p: &InnerProduct, v: &[C64], w: &[C64], max_iters: usize, rel_tol: f64) -> Result<MidpointState> {
    let pv = p.apply(v);
    let pw = p.apply(w);
    let l = vector::inner(&pw, w).re.max(0.0).sqrt();
    if !(l > 1e-300) {
        return Err(Error::NInKernel);
    }
    let vnorm = vector::inner(&pv, v).re.max(0.0).sqrt();
    let mut mu = vnorm / (2.0 * l);
    let mut alphas = Vec::new();
    let mut converged = false;
    for _ in 0..max_iters {
        let m = C64::new(mu, 0.0);
        let r = vector::combine(C64::new(1.0, 0.0), v, -m, w);
        let pr = vector::combine(C64::new(1.0, 0.0), &pv, -m, &pw);
        let alpha = vector::inner(&pr, &r).re.max(0.0).sqrt() / l + mu;
        let prev = alphas.last().copied();
        alphas.push(alpha);
        mu = alpha / 2.0;
        if let Some(prev) = prev {
            if (alpha - prev).abs() <= rel_tol * prev.abs() {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        log::warn!("midpoint refinement stopped after {max_iters} iterations without converging");
    }
    let alpha = alphas.last().copied().unwrap_or(2.0 * mu);
    Ok(MidpointState { mu, alpha, iterations: alphas.len(), converged, alphas })
}

/// `rq ≤ oq ≤ qf(oq/2) ≤ α` for a positive semidefinite pencil.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdChain {
    pub rq: f64,
    pub oq: f64,
    pub qf: f64,
    pub alpha: f64,
    pub chain_holds: bool,
}

impl PsdChain {
    pub fn estimate(&self) -> f64 {
        self.alpha
    }
}

pub fn psd_largest_estimate(pencil: &Pencil, p: &InnerProduct, x: &[C64]) -> Result<PsdChain> {
    let m = Moments::new(pencil, p, x)?;
    let oq = m.optimal_quotient()?;
    let qf = m.quotient_function(oq / 2.0)?;
    let state = midpoint_refine(pencil, p, x, DEFAULT_MAX_ITERS, DEFAULT_REL_TOL)?;
    let (rq, oq, qf, alpha) = (m.rq.re, oq.re, qf.re, state.alpha);
    let slack = 1e-12 * (1.0 + alpha.abs());
    let chain_holds = rq <= oq + slack && oq <= qf + slack && qf <= alpha + slack;
    if !chain_holds {
        log::warn!("estimate chain violated: rq {rq}, oq {oq}, qf {qf}, alpha {alpha}");
    }
    Ok(PsdChain { rq, oq, qf, alpha, chain_holds })
}

/// `(min + max)/2` over the Rayleigh quotients of `k` seeded Gaussian vectors.
pub fn random_rq_midpoint(pencil: &Pencil, p: &InnerProduct, k: usize, seed: u64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidArgument("random midpoint needs at least two samples"));
    }
    let mut rng = random::seeded(seed);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut accepted = 0;
    for _ in 0..3 * k {
        let x = random::gaussian_vec(&mut rng, pencil.dim());
        match Moments::new(pencil, p, &x) {
            Ok(m) => {
                lo = lo.min(m.rq.re);
                hi = hi.max(m.rq.re);
                accepted += 1;
            }
            Err(Error::NInKernel) => continue,
            Err(e) => return Err(e),
        }
        if accepted == k {
            return Ok((lo + hi) / 2.0);
        }
    }
    Err(Error::NInKernel)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReformulationKind {
    /// `Nx = λ(M − ζN)x`
    ShiftInvert { zeta: f64 },
    /// `−(M − rN)x = λNx`
    NegatedShift { r: f64 },
    /// `Nx = λMx`
    Swap,
}

#[derive(Debug, Clone)]
pub struct Reformulation {
    pub kind: ReformulationKind,
    pub original: Pencil,
    pub transformed: Pencil,
}

impl Reformulation {
    /// Eigenvalue of the original pencil from one of the transformed pencil.
    pub fn map_back(&self, lambda: f64) -> Result<f64> {
        match self.kind {
            ReformulationKind::ShiftInvert { zeta } => {
                if lambda == 0.0 {
                    Err(Error::InfiniteEigenvalue)
                } else {
                    Ok(1.0 / lambda + zeta)
                }
            }
            ReformulationKind::Swap => {
                if lambda == 0.0 {
                    Err(Error::InfiniteEigenvalue)
                } else {
                    Ok(1.0 / lambda)
                }
            }
            ReformulationKind::NegatedShift { r } => Ok(r - lambda),
        }
    }

    /// Eigenvalue of the transformed pencil from one of the original pencil.
    pub fn map(&self, lambda: f64) -> Result<f64> {
        match self.kind {
            ReformulationKind::ShiftInvert { zeta } => {
                if lambda == zeta {
                    Err(Error::SingularShift)
                } else {
                    Ok(1.0 / (lambda - zeta))
                }
            }
            ReformulationKind::Swap => {
                if lambda == 0.0 {
                    Err(Error::InfiniteEigenvalue)
                } else {
                    Ok(1.0 / lambda)
                }
            }
            ReformulationKind::NegatedShift { r } => Ok(r - lambda),
        }
    }
}

/// `(N, M − ζN)`. Fails with [`Error::SingularShift`] when `M − ζN` is
/// exactly singular.
pub fn shift_invert_reformulate(pencil: &Pencil, zeta: f64) -> Result<Reformulation> {
    let shifted = pencil.shifted_matrix(C64::new(zeta, 0.0));
    match lu_factor(&shifted) {
        Err(Error::ExactlySingular { .. }) => return Err(Error::SingularShift),
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    Ok(Reformulation {
        kind: ReformulationKind::ShiftInvert { zeta },
        original: pencil.clone(),
        transformed: Pencil::new(pencil.n().clone(), shifted)?,
    })
}

/// `(−(M − rN), N)`.
pub fn negated_shift_reformulate(pencil: &Pencil, r: f64) -> Result<Reformulation> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("negated shift needs r > 0"));
    }
    let m = pencil.shifted_matrix(C64::new(r, 0.0)).scaled(C64::new(-1.0, 0.0));
    Ok(Reformulation {
        kind: ReformulationKind::NegatedShift { r },
        original: pencil.clone(),
        transformed: Pencil::new(m, pencil.n().clone())?,
    })
}

/// `(N, M)`.
pub fn swap_reformulate(pencil: &Pencil) -> Reformulation {
    Reformulation { kind: ReformulationKind::Swap, original: pencil.clone(), transformed: pencil.swapped() }
}
