//! Variational starting vectors: preconditioned descent on
//! `‖(M − μN)x‖²_P / ‖Nx‖²_P`, its accumulated-subspace form, and deflation
//! against eigenvectors already found.

use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_spd, hermitian_definite_eigs, lu_factor, vector, CholeskyFactor, DenseMatrix, InnerProduct, LuFactor, C64};
use crate::pencil::Pencil;
use crate::quotients::Moments;

const ONE: C64 = C64::new(1.0, 0.0);
/// Relative P-norm below which deflation is considered to have removed `x`.
const COLLAPSE_TOL: f64 = 1e-13;

/// The preconditioner `Z` of the equivalent pencil `((M − μN)Z, NZ)`.
#[derive(Debug, Clone)]
pub enum Preconditioner {
    Identity,
    /// `Z` given as a matrix, with its LU factor for `Z⁻¹`.
    Explicit {
        z: DenseMatrix,
        lu: LuFactor,
    },
    /// `Z = A⁻¹` for SPD `A`.
    CholeskySolve {
        a: DenseMatrix,
        factor: CholeskyFactor,
    },
    /// `Z = A⁻¹` for general invertible `A`.
    LuSolve {
        a: DenseMatrix,
        factor: LuFactor,
    },
}

impl Preconditioner {
    pub fn explicit(z: DenseMatrix) -> Result<Self> {
        let lu = lu_factor(&z)?;
        Ok(Self::Explicit { z, lu })
    }

    pub fn inverse_cholesky(a: DenseMatrix) -> Result<Self> {
        let factor = cholesky_spd(&a)?;
        Ok(Self::CholeskySolve { a, factor })
    }

    pub fn inverse_lu(a: DenseMatrix) -> Result<Self> {
        let factor = lu_factor(&a)?;
        Ok(Self::LuSolve { a, factor })
    }

    /// `(M − μN)⁻¹` by LU.
    pub fn shifted_inverse(pencil: &Pencil, mu: f64) -> Result<Self> {
        Self::inverse_lu(pencil.shifted_matrix(C64::new(mu, 0.0)))
    }

    /// `M⁻¹` by Cholesky when `μ = 0` and `M` is SPD, otherwise `(M − μN)⁻¹` by LU.
    pub fn default_for(pencil: &Pencil, mu: f64) -> Result<Self> {
        if mu == 0.0 && pencil.flags().m_hermitian {
            if let Ok(p) = Self::inverse_cholesky(pencil.m().clone()) {
                return Ok(p);
            }
        }
        Self::shifted_inverse(pencil, mu)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Explicit { .. } => "explicit",
            Self::CholeskySolve { .. } => "cholesky-solve",
            Self::LuSolve { .. } => "lu-solve",
        }
    }

    /// `Z·x`
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        match self {
            Self::Identity => x.to_vec(),
            Self::Explicit { z, .. } => z.matvec(x),
            Self::CholeskySolve { factor, .. } => factor.solve(x),
            Self::LuSolve { factor, .. } => factor.solve(x),
        }
    }

    /// `Zᴴ·x`
    pub fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        match self {
            Self::Identity => x.to_vec(),
            Self::Explicit { z, .. } => z.adjoint_matvec(x),
            Self::CholeskySolve { factor, .. } => factor.solve(x),
            Self::LuSolve { factor, .. } => factor.solve_adjoint(x),
        }
    }

    /// `Z⁻¹·x`
    pub fn apply_inverse(&self, x: &[C64]) -> Vec<C64> {
        match self {
            Self::Identity => x.to_vec(),
            Self::Explicit { lu, .. } => lu.solve(x),
            Self::CholeskySolve { a, .. } | Self::LuSolve { a, .. } => a.matvec(x),
        }
    }
}

/// `M̂ = (M − μN)Z`, `N̂ = NZ`, applied without forming the products.
#[derive(Debug, Clone)]
pub struct HatPencil<'a> {
    shifted: DenseMatrix,
    n: &'a DenseMatrix,
    z: &'a Preconditioner,
    mu: f64,
}

/// `Zx`, `M̂x` and `N̂x` for one `x`.
#[derive(Debug, Clone)]
pub struct HatProducts {
    pub zx: Vec<C64>,
    pub mx: Vec<C64>,
    pub nx: Vec<C64>,
}

impl<'a> HatPencil<'a> {
    pub fn new(pencil: &'a Pencil, mu: f64, z: &'a Preconditioner) -> Self {
        Self { shifted: pencil.shifted_matrix(C64::new(mu, 0.0)), n: pencil.n(), z, mu }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn dim(&self) -> usize {
        self.n.rows()
    }

    pub fn preconditioner(&self) -> &Preconditioner {
        self.z
    }

    pub fn products(&self, x: &[C64]) -> HatProducts {
        let zx = self.z.apply(x);
        let mx = self.shifted.matvec(&zx);
        let nx = self.n.matvec(&zx);
        HatProducts { zx, mx, nx }
    }

    /// `‖M̂x‖²_P / ‖N̂x‖²_P`
    pub fn objective(&self, p: &InnerProduct, x: &[C64]) -> Result<f64> {
        let h = self.products(x);
        objective_of(p, &h)
    }

    fn direction_parts(&self, p: &InnerProduct, h: &HatProducts) -> Result<(Vec<C64>, Vec<C64>, f64)> {
        let f = objective_of(p, h)?;
        let t1 = self.z.apply_adjoint(&self.shifted.adjoint_matvec(&p.apply(&h.mx)));
        let t2 = self.z.apply_adjoint(&self.n.adjoint_matvec(&p.apply(&h.nx)));
        Ok((t1, t2, f))
    }

    /// `M̂ᴴPM̂x − (‖M̂x‖²_P/‖N̂x‖²_P)·N̂ᴴPN̂x`
    pub fn direction(&self, p: &InnerProduct, x: &[C64]) -> Result<Vec<C64>> {
        let (t1, t2, f) = self.direction_parts(p, &self.products(x))?;
        Ok(vector::combine(ONE, &t1, C64::new(-f, 0.0), &t2))
    }
}

fn objective_of(p: &InnerProduct, h: &HatProducts) -> Result<f64> {
    let nn = p.norm_sq(&h.nx);
    if !(nn.sqrt() > 1e-300) {
        return Err(Error::NInKernel);
    }
    Ok(p.norm_sq(&h.mx) / nn)
}

/// Unpreconditioned descent direction for `‖(M − μN)x‖²_P / ‖Nx‖²_P`.
pub fn descent_direction(pencil: &Pencil, p: &InnerProduct, x: &[C64], mu: f64) -> Result<Vec<C64>> {
    HatPencil::new(pencil, mu, &Preconditioner::Identity).direction(p, x)
}

/// Smallest eigenpair of the 2×2 pencil `(Gm, Gn)` from the characteristic
/// quadratic `det(Gn)·λ² − b·λ + det(Gm) = 0`.
pub fn smallest_pair_2x2(gm: [[C64; 2]; 2], gn: [[C64; 2]; 2]) -> (f64, [C64; 2]) {
    let (a11, a22, a12) = (gm[0][0].re, gm[1][1].re, gm[0][1]);
    let (b11, b22, b12) = (gn[0][0].re, gn[1][1].re, gn[0][1]);
    let qa = b11 * b22 - b12.norm_sqr();
    let qb = a11 * b22 + a22 * b11 - 2.0 * (a12 * b12.conj()).re;
    let qc = a11 * a22 - a12.norm_sqr();
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let denom = qb + disc.sqrt();
    let lambda = if denom > 0.0 { 2.0 * qc / denom } else { 0.0 };
    let m11 = C64::new(a11 - lambda * b11, 0.0);
    let m22 = C64::new(a22 - lambda * b22, 0.0);
    let m12 = a12 - b12 * lambda;
    let u = [-m12, m11];
    let w = [m22, -m12.conj()];
    let (nu, nw) = (u[0].norm_sqr() + u[1].norm_sqr(), w[0].norm_sqr() + w[1].norm_sqr());
    let v = if nu >= nw { u } else { w };
    let v = if nu.max(nw) == 0.0 { [ONE, C64::new(0.0, 0.0)] } else { v };
    (lambda, v)
}

#[derive(Debug, Clone)]
pub struct DescentStep {
    pub x: Vec<C64>,
    /// Smallest eigenvalue of the projected 2×2 problem.
    pub value: f64,
}

/// One step of the descent in hat coordinates.
///
/// Fails with [`Error::DirectionNegligible`] when the direction, once
/// `P`-orthogonalized against `x`, has `P`-norm at most
/// `direction_tol·(‖M̂ᴴPM̂x‖_P + f·‖N̂ᴴPN̂x‖_P)`.
pub fn descent_step(hat: &HatPencil<'_>, p: &InnerProduct, x: &[C64], direction_tol: f64) -> Result<DescentStep> {
    step_with(hat, p, x, direction_tol, None)
}

/// Maps a hat-space direction into the deflated subspace.
type Projection<'a> = Option<&'a dyn Fn(&[C64]) -> Result<Vec<C64>>>;

fn project(project: Projection<'_>, q: Vec<C64>) -> Result<Vec<C64>> {
    match project {
        None => Ok(q),
        Some(f) => match f(&q) {
            Err(Error::DeflationCollapse) => Err(Error::DirectionNegligible),
            r => r,
        },
    }
}

fn step_with(hat: &HatPencil<'_>, p: &InnerProduct, x: &[C64], direction_tol: f64, projection: Projection<'_>) -> Result<DescentStep> {
    let xn = p.norm(x);
    if xn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let x = vector::scaled(x, C64::new(1.0 / xn, 0.0));
    let h = hat.products(&x);
    let (t1, t2, f) = hat.direction_parts(p, &h)?;
    let d = vector::combine(ONE, &t1, C64::new(-f, 0.0), &t2);
    let scale = p.norm(&t1) + f * p.norm(&t2);
    let mut q = project(projection, d)?;
    for _ in 0..2 {
        let c = p.inner(&q, &x);
        vector::axpy(-c, &x, &mut q);
    }
    let qn = p.norm(&q);
    if !(qn > direction_tol * scale) {
        return Err(Error::DirectionNegligible);
    }
    vector::scale(&mut q, C64::new(1.0 / qn, 0.0));
    let hq = hat.products(&q);
    let gram = |u: &[C64], w: &[C64]| -> [[C64; 2]; 2] {
        let pu = p.apply(u);
        let pw = p.apply(w);
        // G_ij = (v_j, v_i)_P
        let g11 = vector::inner(&pu, u);
        let g22 = vector::inner(&pw, w);
        let g12 = vector::inner(&pw, u);
        [[g11, g12], [g12.conj(), g22]]
    };
    let gm = gram(&h.mx, &hq.mx);
    let gn = gram(&h.nx, &hq.nx);
    let (value, v) = smallest_pair_2x2(gm, gn);
    let next = vector::combine(v[0], &x, v[1], &q);
    let nn = p.norm(&next);
    Ok(DescentStep { x: vector::scaled(&next, C64::new(1.0 / nn, 0.0)), value })
}

/// Eigenvectors already found, with `(M − μN)xⱼ` cached.
#[derive(Debug, Clone)]
pub struct DeflationSet {
    mu: f64,
    vectors: Vec<Vec<C64>>,
    images: Vec<Vec<C64>>,
    p_images: Vec<Vec<C64>>,
    norms_sq: Vec<f64>,
}

impl DeflationSet {
    pub fn new(mu: f64) -> Self {
        Self { mu, vectors: Vec::new(), images: Vec::new(), p_images: Vec::new(), norms_sq: Vec::new() }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn push(&mut self, pencil: &Pencil, p: &InnerProduct, x: Vec<C64>) -> Result<()> {
        let image = pencil.shifted_matrix(C64::new(self.mu, 0.0)).matvec(&x);
        let p_image = p.apply(&image);
        let nsq = vector::inner(&p_image, &image).re;
        if !(nsq > 0.0) {
            return Err(Error::InvalidArgument("deflation vector is an eigenvector for mu itself"));
        }
        self.vectors.push(x);
        self.images.push(image);
        self.p_images.push(p_image);
        self.norms_sq.push(nsq);
        Ok(())
    }

    /// Largest normalized `|((M − μN)xᵢ, (M − μN)xⱼ)_P|` over `i ≠ j`.
    pub fn pairwise_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            for j in 0..i {
                let c = vector::inner(&self.p_images[i], &self.images[j]).norm();
                worst = worst.max(c / (self.norms_sq[i] * self.norms_sq[j]).sqrt());
            }
        }
        worst
    }

    /// Coefficient of `xⱼ` to remove from a vector whose image is `ax`.
    fn coefficient(&self, j: usize, ax: &[C64]) -> C64 {
        // ((M − μN)x, (M − μN)xⱼ)_P = (PAxⱼ)ᴴ·Ax
        vector::inner(ax, &self.p_images[j]) / self.norms_sq[j]
    }
}

/// `x − Σⱼ c_j·xⱼ` with `c_j = ((M−μN)x, (M−μN)xⱼ)_P / ‖(M−μN)xⱼ‖²_P`, applied
/// sequentially, for the shift of the set.
pub fn deflate_vector(x: &[C64], set: &DeflationSet, pencil: &Pencil, p: &InnerProduct) -> Result<Vec<C64>> {
    if set.is_empty() {
        return Ok(x.to_vec());
    }
    let shifted = pencil.shifted_matrix(C64::new(set.mu, 0.0));
    let before = p.norm(x);
    let mut y = x.to_vec();
    for j in 0..set.len() {
        let c = set.coefficient(j, &shifted.matvec(&y));
        vector::axpy(-c, &set.vectors[j], &mut y);
    }
    if !(p.norm(&y) > COLLAPSE_TOL * before) {
        return Err(Error::DeflationCollapse);
    }
    Ok(y)
}

/// Deflation of a hat-space vector `y`. The condition is imposed on `w = Zy`
/// and the deflated `w` is mapped back by `Z⁻¹`, which avoids amplifying
/// rounding through `Z` when `Z` is nearly singular on the deflated vectors.
/// Returns both the new `y` and the deflated `w`.
fn deflate_hat(y: &[C64], set: &DeflationSet, pencil: &Pencil, z: &Preconditioner, p: &InnerProduct) -> Result<(Vec<C64>, Vec<C64>)> {
    let w = deflate_vector(&z.apply(y), set, pencil, p)?;
    Ok((z.apply_inverse(&w), w))
}

#[derive(Debug, Clone)]
pub struct DescentConfig {
    pub mu: f64,
    pub preconditioner: Preconditioner,
    pub max_steps: usize,
    pub direction_tol: f64,
    /// Minimize over all directions generated so far instead of the last pair.
    pub accumulate: bool,
}

impl DescentConfig {
    pub fn new(mu: f64, preconditioner: Preconditioner) -> Self {
        Self { mu, preconditioner, max_steps: 10, direction_tol: 1e-13, accumulate: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentRecord {
    pub step: usize,
    /// `‖M̂x‖²_P / ‖N̂x‖²_P` at the hat-space iterate.
    pub objective: f64,
    /// Rayleigh quotient of the hat pencil at the hat-space iterate, shifted back by `μ`.
    pub rq_hat: f64,
    /// Rayleigh quotient of the original pencil at `Zx`.
    pub rq: f64,
}

#[derive(Debug, Clone)]
pub struct DescentOutcome {
    /// `Z·x` of the final hat-space iterate.
    pub x: Vec<C64>,
    pub x_hat: Vec<C64>,
    /// Record 0 describes the (deflated) start.
    pub records: Vec<DescentRecord>,
    pub steps: usize,
    /// The direction vanished, or the projected problem lost definiteness,
    /// before `max_steps`.
    pub stationary: bool,
}

/// Runs `config.max_steps` descent steps on `((M − μN)Z, NZ)` from `x0`,
/// deflating after every update, and returns `x := Zx`. Search directions
/// are deflated too, so the whole step stays in the deflated subspace.
pub fn preconditioned_descent(
    pencil: &Pencil,
    p: &InnerProduct,
    config: &DescentConfig,
    x0: &[C64],
    deflation: &DeflationSet,
) -> Result<DescentOutcome> {
    if x0.len() != pencil.dim() || p.dim() != pencil.dim() {
        return Err(Error::DimensionMismatch { expected: pencil.dim(), found: x0.len().min(p.dim()) });
    }
    if !deflation.is_empty() && deflation.mu() != config.mu {
        return Err(Error::InvalidArgument("deflation set was built for a different shift"));
    }
    let hat = HatPencil::new(pencil, config.mu, &config.preconditioner);
    let z = &config.preconditioner;
    // (hat iterate, Z·iterate), the latter exact after deflation.
    let deflate = |y: &[C64]| -> Result<(Vec<C64>, Vec<C64>)> {
        let (y, zy) = if deflation.is_empty() { (y.to_vec(), z.apply(y)) } else { deflate_hat(y, deflation, pencil, z, p)? };
        let n = p.norm(&y);
        if !(n > 0.0) {
            return Err(Error::ZeroVector);
        }
        let s = C64::new(1.0 / n, 0.0);
        Ok((vector::scaled(&y, s), vector::scaled(&zy, s)))
    };
    let record = |step: usize, x: &[C64], zx: &[C64]| -> Result<DescentRecord> {
        let h = hat.products(x);
        let objective = objective_of(p, &h)?;
        let rq_hat = Moments::from_products(p, h.mx.clone(), h.nx.clone())?.rq.re + config.mu;
        let rq = Moments::new(pencil, p, zx)?.rq.re;
        Ok(DescentRecord { step, objective, rq_hat, rq })
    };

    let project_direction = |q: &[C64]| -> Result<Vec<C64>> { Ok(deflate_hat(q, deflation, pencil, z, p)?.0) };
    let projection: Projection<'_> = if deflation.is_empty() { None } else { Some(&project_direction) };
    let (mut x, mut zx) = deflate(x0)?;
    let mut records = alloc::vec![record(0, &x, &zx)?];
    let mut stationary = false;
    let mut steps = 0;
    if config.accumulate {
        let mut basis: Vec<Vec<C64>> = alloc::vec![x.clone()];
        for step in 1..=config.max_steps {
            match extend_basis(&hat, p, &mut basis, &x, config.direction_tol, projection) {
                Ok(()) => {}
                Err(Error::DirectionNegligible) => {
                    stationary = true;
                    break;
                }
                Err(e) => return Err(e),
            }
            match projected_minimizer(&hat, p, &basis) {
                Ok((m, _)) => (x, zx) = deflate(&m)?,
                Err(Error::NotPositiveDefinite { .. }) => {
                    basis.pop();
                    stationary = true;
                    break;
                }
                Err(e) => return Err(e),
            }
            records.push(record(step, &x, &zx)?);
            steps = step;
        }
    } else {
        for step in 1..=config.max_steps {
            match step_with(&hat, p, &x, config.direction_tol, projection) {
                Ok(s) => (x, zx) = deflate(&s.x)?,
                Err(Error::DirectionNegligible) => {
                    stationary = true;
                    break;
                }
                Err(e) => return Err(e),
            }
            records.push(record(step, &x, &zx)?);
            steps = step;
        }
    }
    Ok(DescentOutcome { x: zx, x_hat: x, records, steps, stationary })
}

/// Appends the direction at `x`, `P`-orthonormalized against `basis`.
fn extend_basis(
    hat: &HatPencil<'_>,
    p: &InnerProduct,
    basis: &mut Vec<Vec<C64>>,
    x: &[C64],
    tol: f64,
    projection: Projection<'_>,
) -> Result<()> {
    let h = hat.products(x);
    let (t1, t2, f) = hat.direction_parts(p, &h)?;
    let scale = p.norm(&t1) + f * p.norm(&t2);
    let mut q = project(projection, vector::combine(ONE, &t1, C64::new(-f, 0.0), &t2))?;
    for _ in 0..2 {
        for b in basis.iter() {
            let c = p.inner(&q, b);
            vector::axpy(-c, b, &mut q);
        }
    }
    let qn = p.norm(&q);
    if !(qn > tol * scale) {
        return Err(Error::DirectionNegligible);
    }
    vector::scale(&mut q, C64::new(1.0 / qn, 0.0));
    basis.push(q);
    Ok(())
}

/// Minimizer over `span(basis)` of the hat objective, with its value.
fn projected_minimizer(hat: &HatPencil<'_>, p: &InnerProduct, basis: &[Vec<C64>]) -> Result<(Vec<C64>, f64)> {
    let k = basis.len();
    let prods: Vec<HatProducts> = basis.iter().map(|b| hat.products(b)).collect();
    let pm: Vec<Vec<C64>> = prods.iter().map(|h| p.apply(&h.mx)).collect();
    let pn: Vec<Vec<C64>> = prods.iter().map(|h| p.apply(&h.nx)).collect();
    let gm = DenseMatrix::from_fn(k, k, |i, j| vector::inner(&pm[i], &prods[j].mx).conj()).hermitian_part();
    let gn = DenseMatrix::from_fn(k, k, |i, j| vector::inner(&pn[i], &prods[j].nx).conj()).hermitian_part();
    let e = hermitian_definite_eigs(&gm, &gn)?;
    let v = e.vector(0);
    let mut x = alloc::vec![C64::new(0.0, 0.0); hat.dim()];
    for (b, c) in basis.iter().zip(&v) {
        vector::axpy(*c, b, &mut x);
    }
    Ok((x, e.values[0]))
}

#[derive(Debug, Clone)]
pub struct SubspaceOutcome {
    /// `P`-orthonormal `q₁, …, q_k`.
    pub basis: Vec<Vec<C64>>,
    /// Minimizer over the final span, in hat coordinates.
    pub minimizer: Vec<C64>,
    /// Minimal projected value after each basis size `1, …, k`.
    pub values: Vec<f64>,
    /// Set when a direction vanished, or the projected problem lost
    /// definiteness, before reaching `k` vectors.
    pub breakdown: bool,
}

/// Accumulates up to `k` directions, each taken at the current minimizer
/// over the span built so far.
pub fn accumulate_subspace(hat: &HatPencil<'_>, p: &InnerProduct, x0: &[C64], k: usize, direction_tol: f64) -> Result<SubspaceOutcome> {
    if k == 0 || k > hat.dim() {
        return Err(Error::InvalidArgument("subspace size must be between 1 and n"));
    }
    let n0 = p.norm(x0);
    if n0 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut basis = alloc::vec![vector::scaled(x0, C64::new(1.0 / n0, 0.0))];
    let mut x = basis[0].clone();
    let mut values = alloc::vec![hat.objective(p, &x)?];
    let mut breakdown = false;
    while basis.len() < k {
        match extend_basis(hat, p, &mut basis, &x, direction_tol, None) {
            Ok(()) => {}
            Err(Error::DirectionNegligible) => {
                breakdown = true;
                break;
            }
            Err(e) => return Err(e),
        }
        let (m, value) = match projected_minimizer(hat, p, &basis) {
            Ok(r) => r,
            Err(Error::NotPositiveDefinite { .. }) => {
                basis.pop();
                breakdown = true;
                break;
            }
            Err(e) => return Err(e),
        };
        x = m;
        values.push(value);
    }
    let nx = p.norm(&x);
    Ok(SubspaceOutcome { basis, minimizer: vector::scaled(&x, C64::new(1.0 / nx, 0.0)), values, breakdown })
}
