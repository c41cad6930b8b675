//! Optimal quotient iterations.
//!
//! Both iterations advance `x` by one shifted solve `(A − lB)x̂ = z`, where `z`
//! is the unit vector best aligned with `Ax` and `Bx` together, and stop when
//! the two columns `[Ax Bx]` become numerically parallel (monitored by their
//! second singular value).

use alloc::boxed::Box;
use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::linalg::{lu_factor, vector, DenseMatrix, InnerProduct, LuFactor, C64};
use crate::midpoint::{refine_from_products, DEFAULT_MAX_ITERS, DEFAULT_REL_TOL};
use crate::pencil::Pencil;
use crate::quotients::Moments;

#[derive(Debug, Clone, Copy)]
pub struct IterationConfig {
    /// Stop once `σ₂ ≤ epsilon`.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Midpoint shift; required by [`optimal_quotient_iteration`].
    pub mu: Option<f64>,
    /// Relative bump applied to `l` once when a shifted solve is exactly singular.
    pub singular_shift_bump: f64,
    /// Monitor `σ₂` of the raw columns instead of the `P`-normalized ones.
    pub raw_sigma2: bool,
    /// Optional seconds-since-some-epoch clock for per-iteration timing.
    pub clock: Option<fn() -> f64>,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self { epsilon: 1e-10, max_iters: 50, mu: None, singular_shift_bump: 1e-12, raw_sigma2: false, clock: None }
    }
}

impl IterationConfig {
    pub fn with_mu(mu: f64) -> Self {
        Self { mu: Some(mu), ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument("epsilon must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// State at the top of one loop pass, before the stop test.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// Shift `l` in the coordinates of the iterated pair.
    pub l: C64,
    pub sigma2: f64,
    /// Eigenvalue estimate of the original pencil.
    pub quotient_estimate: f64,
    /// Rayleigh quotient of the original pencil at the same `x`, for comparison.
    pub rq_estimate: f64,
    /// Set when the solve that produced this `x` was flagged near singular.
    pub solve_near_singular: bool,
    /// Set when the solve that produced this `x` needed the shift bump.
    pub shift_bumped: bool,
    pub elapsed: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationLog {
    pub records: Vec<IterationRecord>,
    /// Final, `P`-normalized iterate.
    pub x: Vec<C64>,
    pub estimate: f64,
    pub rq_estimate: f64,
    pub converged: bool,
    /// Number of shifted solves performed.
    pub iterations: usize,
}

impl IterationLog {
    pub fn sigma2_trajectory(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.sigma2).collect()
    }
}

/// Second singular value of `[a b]` in the `P`-inner product, from the 2×2
/// Gram matrix. The determinant is formed as `‖a‖²·‖b − proj_a b‖²` to avoid
/// cancellation for nearly parallel columns.
pub fn sigma2_raw(p: &InnerProduct, a: &[C64], b: &[C64]) -> Result<f64> {
    let pa = p.apply(a);
    let pb = p.apply(b);
    let aa = vector::inner(&pa, a).re.max(0.0);
    let bb = vector::inner(&pb, b).re.max(0.0);
    if aa == 0.0 || bb == 0.0 {
        return Err(Error::ZeroVector);
    }
    // c = (b, a)_P / ‖a‖²_P
    let c = vector::inner(&pb, a) / aa;
    let r = vector::combine(C64::new(1.0, 0.0), b, -c, a);
    let pr = vector::combine(C64::new(1.0, 0.0), &pb, -c, &pa);
    let det = aa * vector::inner(&pr, &r).re.max(0.0);
    let tr = aa + bb;
    let s1sq = (tr + (tr * tr - 4.0 * det).max(0.0).sqrt()) / 2.0;
    Ok(det.sqrt() / s1sq.sqrt())
}

/// `σ₂` of the `P`-normalized columns `[a/‖a‖_P  b/‖b‖_P]`; lies in `[0, 1]`.
pub fn sigma2(p: &InnerProduct, a: &[C64], b: &[C64]) -> Result<f64> {
    let (na, nb) = (p.norm(a), p.norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    let ah = vector::scaled(a, C64::new(1.0 / na, 0.0));
    let bh = vector::scaled(b, C64::new(1.0 / nb, 0.0));
    sigma2_raw(p, &ah, &bh)
}

/// `z = (g/|g|·w₁ + w₂)/√(2 + 2|g|)` with `g = (w₂, w₁)_P`; the phase is 1
/// when `g = 0`.
pub fn optimal_z(p: &InnerProduct, w1: &[C64], w2: &[C64]) -> Vec<C64> {
    let g = p.inner(w2, w1);
    let ph = vector::phase(g).unwrap_or(C64::new(1.0, 0.0));
    let s = 1.0 / (2.0 + 2.0 * g.norm()).sqrt();
    vector::combine(ph * s, w1, C64::new(s, 0.0), w2)
}

/// `|(z, w₁)_P|² + |(z, w₂)_P|²`, which [`optimal_z`] maximizes over unit `z`.
pub fn alignment_objective(p: &InnerProduct, z: &[C64], w1: &[C64], w2: &[C64]) -> f64 {
    let pz = p.apply(z);
    vector::inner(&pz, w1).norm_sqr() + vector::inner(&pz, w2).norm_sqr()
}

/// Relative Hermitian defect of `Nᴴ·P·(M − lN)`.
pub fn hermitian_system_check(pencil: &Pencil, p: &InnerProduct, l: f64) -> f64 {
    let shifted = pencil.shifted_matrix(C64::new(l, 0.0));
    pencil.n().adjoint().matmul(&p.apply_matrix(&shifted)).hermitian_defect()
}

struct SolveOutcome {
    x: Vec<C64>,
    near_singular: bool,
    bumped: bool,
}

/// Solves `(A − lB)x̂ = z`, retrying once with a bumped shift on exact
/// singularity.
fn shifted_solve(a: &DenseMatrix, b: &DenseMatrix, l: C64, z: &[C64], bump: f64) -> Result<SolveOutcome> {
    let factor = |l: C64| -> Result<LuFactor> { lu_factor(&a.add_scaled(-l, b)) };
    let (f, bumped) = match factor(l) {
        Ok(f) => (f, false),
        Err(Error::ExactlySingular { .. }) => {
            let l2 = l + C64::new(bump * (1.0 + l.norm()), 0.0);
            log::debug!("shifted matrix exactly singular at l = {l}; retrying at {l2}");
            (factor(l2)?, true)
        }
        Err(e) => return Err(e),
    };
    Ok(SolveOutcome { x: f.solve(z), near_singular: f.near_singular(), bumped })
}

fn normalized(p: &InnerProduct, x: &[C64]) -> Result<Vec<C64>> {
    let nrm = p.norm(x);
    if !(nrm > 0.0) || !nrm.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(vector::scaled(x, C64::new(1.0 / nrm, 0.0)))
}

fn monitor(p: &InnerProduct, a: &[C64], b: &[C64], raw: bool) -> Result<f64> {
    if raw {
        sigma2_raw(p, a, b)
    } else {
        sigma2(p, a, b)
    }
}

/// Line-by-line loop shared by the iterations. `shift` returns `(l, estimate)`
/// for the current `(Ax, Bx)` pair.
struct Driver<'a> {
    p: &'a InnerProduct,
    a: DenseMatrix,
    b: DenseMatrix,
    original: &'a Pencil,
    config: IterationConfig,
}

impl Driver<'_> {
    fn run(
        &self,
        x0: &[C64],
        mut shift: impl FnMut(&[C64], &[C64], &[C64]) -> Result<(C64, f64)>,
        mut rhs: impl FnMut(&[C64], &[C64], &[C64]) -> Vec<C64>,
    ) -> Result<IterationLog> {
        self.config.validate()?;
        let mut x = normalized(self.p, x0)?;
        let mut log = IterationLog::default();
        let mut last_solve = (false, false);
        for k in 0..=self.config.max_iters {
            let ax = self.a.matvec(&x);
            let bx = self.b.matvec(&x);
            if self.p.norm(&bx) <= 1e-300 {
                return Err(Error::NInKernel);
            }
            let rq_estimate = Moments::new(self.original, self.p, &x)?.rq.re;
            let (l, estimate, sigma2) = if self.p.norm(&ax) == 0.0 {
                // x is an exact eigenvector with eigenvalue zero in these coordinates.
                let (l, est) = shift(&x, &ax, &bx).unwrap_or((C64::new(0.0, 0.0), rq_estimate));
                (l, est, 0.0)
            } else {
                let s = monitor(self.p, &ax, &bx, self.config.raw_sigma2)?;
                let (l, est) = shift(&x, &ax, &bx).map_err(|e| match e {
                    Error::PhaseUndefined => Error::PhaseBreakdown { iteration: k },
                    other => other,
                })?;
                (l, est, s)
            };
            log.records.push(IterationRecord {
                k,
                l,
                sigma2,
                quotient_estimate: estimate,
                rq_estimate,
                solve_near_singular: last_solve.0,
                shift_bumped: last_solve.1,
                elapsed: self.config.clock.map(|c| c()),
            });
            log.estimate = estimate;
            log.rq_estimate = rq_estimate;
            if sigma2 <= self.config.epsilon {
                log.converged = true;
                log.x = x;
                return Ok(log);
            }
            if k == self.config.max_iters {
                break;
            }
            let z = rhs(&x, &ax, &bx);
            let out = shifted_solve(&self.a, &self.b, l, &z, self.config.singular_shift_bump)?;
            last_solve = (out.near_singular, out.bumped);
            x = normalized(self.p, &out.x)?;
            log.iterations += 1;
        }
        log.x = x;
        Err(Error::NonConvergence(Box::new(log)))
    }
}

fn unit_pair(p: &InnerProduct, a: &[C64], b: &[C64]) -> Vec<C64> {
    let w1 = vector::scaled(a, C64::new(1.0 / p.norm(a), 0.0));
    let w2 = vector::scaled(b, C64::new(1.0 / p.norm(b), 0.0));
    optimal_z(p, &w1, &w2)
}

/// Optimal quotient iteration about the midpoint shift `config.mu`, with
/// `A = M − μN`, `B = N` and `l = oq(A, B)(x)`. The reported eigenvalue is
/// `l + μ`.
pub fn optimal_quotient_iteration(pencil: &Pencil, p: &InnerProduct, x0: &[C64], config: &IterationConfig) -> Result<IterationLog> {
    let mu = config.mu.ok_or(Error::InvalidArgument("the optimal quotient iteration needs a midpoint shift"))?;
    check_dims(pencil, p, x0)?;
    let driver = Driver { p, a: pencil.shifted_matrix(C64::new(mu, 0.0)), b: pencil.n().clone(), original: pencil, config: *config };
    driver.run(
        x0,
        |_, ax, bx| {
            let l = Moments::from_products(p, ax.to_vec(), bx.to_vec())?.optimal_quotient()?;
            Ok((l, l.re + mu))
        },
        |_, ax, bx| unit_pair(p, ax, bx),
    )
}

/// Iteration for the smallest eigenvalue of a positive definite pencil. The
/// shift is `l = 1/α` with `α` from the midpoint refinement of `(N, M)`.
pub fn smallest_pd_iteration(pencil: &Pencil, p: &InnerProduct, x0: &[C64], config: &IterationConfig) -> Result<IterationLog> {
    check_dims(pencil, p, x0)?;
    let driver = Driver { p, a: pencil.m().clone(), b: pencil.n().clone(), original: pencil, config: *config };
    driver.run(
        x0,
        |_, mx, nx| {
            let alpha = refine_from_products(p, nx, mx, DEFAULT_MAX_ITERS, DEFAULT_REL_TOL)?.alpha;
            if !(alpha > 0.0) {
                return Err(Error::InvalidArgument("midpoint refinement of the swapped pencil is not positive"));
            }
            Ok((C64::new(1.0 / alpha, 0.0), 1.0 / alpha))
        },
        |_, mx, nx| unit_pair(p, mx, nx),
    )
}

/// Classical Rayleigh quotient iteration `(M − rq·N)x̂ = Nx`, kept as a
/// baseline for comparisons. Same monitor and stopping rule.
pub fn rayleigh_quotient_iteration(pencil: &Pencil, p: &InnerProduct, x0: &[C64], config: &IterationConfig) -> Result<IterationLog> {
    check_dims(pencil, p, x0)?;
    let driver = Driver { p, a: pencil.m().clone(), b: pencil.n().clone(), original: pencil, config: *config };
    driver.run(
        x0,
        |_, mx, nx| {
            let rq = Moments::from_products(p, mx.to_vec(), nx.to_vec())?.rq;
            Ok((rq, rq.re))
        },
        |_, _, nx| nx.to_vec(),
    )
}

fn check_dims(pencil: &Pencil, p: &InnerProduct, x: &[C64]) -> Result<()> {
    let n = pencil.dim();
    for found in [p.dim(), x.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    Ok(())
}
