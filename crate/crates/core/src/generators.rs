//! Canonical test pencils with their known facts.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // float math without std
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_spd, lu_factor, pencil_eigs_oracle, vector, DenseMatrix, InnerProduct, C64};
use crate::pencil::Pencil;
use crate::quotients::check_self_adjoint;
use crate::random;

/// Largest dimension at which facts are cross-checked against the oracle.
pub const ORACLE_CHECK_MAX_DIM: usize = 100;
const FACT_TOL: f64 = 1e-9;
const SELF_ADJOINT_TOL: f64 = 1e-10;

/// How to build the inner product for a pencil.
#[derive(Debug, Clone)]
pub enum PRecipe {
    Identity,
    InverseM,
    InverseN,
    Explicit(DenseMatrix),
}

impl PRecipe {
    pub fn build(&self, pencil: &Pencil) -> Result<InnerProduct> {
        match self {
            Self::Identity => Ok(InnerProduct::identity(pencil.dim())),
            Self::InverseM => InnerProduct::inverse_of(pencil.m()),
            Self::InverseN => InnerProduct::inverse_of(pencil.n()),
            Self::Explicit(p) => InnerProduct::explicit(p.clone()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::InverseM => "inv-m",
            Self::InverseN => "inv-n",
            Self::Explicit(_) => "explicit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactSource {
    /// Known from how the pencil was assembled.
    Construction,
    /// Computed by the oracle.
    Oracle,
}

#[derive(Debug, Clone, Default)]
pub struct Facts {
    /// Finite eigenvalues, ascending.
    pub spectrum: Option<Vec<f64>>,
    pub spectrum_source: Option<FactSource>,
    /// The construction spectrum was reproduced by the oracle.
    pub oracle_verified: bool,
    pub positive_definite: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct ProblemBundle {
    pub name: String,
    pub pencil: Pencil,
    pub p_recipe: PRecipe,
    pub trial: Option<Vec<C64>>,
    pub facts: Facts,
}

impl ProblemBundle {
    pub fn inner_product(&self) -> Result<InnerProduct> {
        self.p_recipe.build(&self.pencil)
    }

    pub fn dim(&self) -> usize {
        self.pencil.dim()
    }

    fn new(name: &str, pencil: Pencil, p_recipe: PRecipe) -> Self {
        Self { name: name.into(), pencil, p_recipe, trial: None, facts: Facts::default() }
    }

    /// Records a spectrum known from the construction and, at desk scale,
    /// checks it against the oracle.
    fn with_constructed_spectrum(mut self, mut spectrum: Vec<f64>, check: bool) -> Result<Self> {
        spectrum.sort_by(f64::total_cmp);
        self.facts.spectrum_source = Some(FactSource::Construction);
        if check && self.dim() <= ORACLE_CHECK_MAX_DIM {
            let p = self.inner_product()?;
            let oracle = pencil_eigs_oracle(&self.pencil, &p)?;
            let worst = spectrum_deviation(&spectrum, &oracle.eigenvalues);
            if !(worst <= FACT_TOL) {
                return Err(Error::FactsDisagree { worst });
            }
            self.facts.oracle_verified = true;
        }
        self.facts.spectrum = Some(spectrum);
        Ok(self)
    }

    /// Spectrum from the oracle when the pencil is small enough.
    fn with_oracle_spectrum(mut self) -> Result<Self> {
        if self.dim() <= ORACLE_CHECK_MAX_DIM {
            let p = self.inner_product()?;
            let oracle = pencil_eigs_oracle(&self.pencil, &p)?;
            self.facts.spectrum = Some(oracle.eigenvalues);
            self.facts.spectrum_source = Some(FactSource::Oracle);
        }
        Ok(self)
    }
}

/// Largest `|aᵢ − bᵢ| / max(1, max |b|)`, infinite when the counts differ.
pub fn spectrum_deviation(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let scale = b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs() / scale).fold(0.0, f64::max)
}

/// The 3×3 symmetric `M` with rows `(2,1,1), (1,3,1), (1,1,4)`, `N = I`,
/// trial vector `(1,1,1)/√3`.
pub fn gen_kungfood() -> Result<ProblemBundle> {
    let m = DenseMatrix::from_real_rows(&[&[2.0, 1.0, 1.0], &[1.0, 3.0, 1.0], &[1.0, 1.0, 4.0]]);
    let mut b = ProblemBundle::new("kungfood", Pencil::standard(m)?, PRecipe::Identity).with_oracle_spectrum()?;
    b.trial = Some(vector::from_real(&[1.0 / 3f64.sqrt(); 3]));
    b.facts.positive_definite = Some(true);
    Ok(b)
}

/// `M = J + E` with `(Jx)ᵢ = xᵢ₊₁`, `N = I`, trial vector all ones.
/// `E` is an optional real diagonal.
pub fn gen_forward_shift(n: usize, diag: Option<&[f64]>) -> Result<ProblemBundle> {
    if n < 2 {
        return Err(Error::InvalidArgument("forward shift needs n >= 2"));
    }
    if diag.is_some_and(|d| d.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: diag.map_or(0, <[f64]>::len) });
    }
    let m = DenseMatrix::from_fn(n, n, |i, j| {
        let shift = if j == i + 1 { 1.0 } else { 0.0 };
        let e = if i == j { diag.map_or(0.0, |d| d[i]) } else { 0.0 };
        C64::new(shift + e, 0.0)
    });
    let ones = alloc::vec![C64::new(1.0, 0.0); n];
    if diag.is_none() {
        let mx = m.matvec(&ones);
        let rq = vector::inner(&mx, &ones).re / n as f64;
        debug_assert!((rq - (1.0 - 1.0 / n as f64)).abs() < 1e-14);
    }
    let spectrum = diag.map_or_else(|| alloc::vec![0.0; n], <[f64]>::to_vec);
    let mut b = ProblemBundle::new("forward-shift", Pencil::standard(m)?, PRecipe::Identity).with_constructed_spectrum(spectrum, false)?;
    b.trial = Some(ones);
    Ok(b)
}

/// Dirichlet second-difference matrix `(2, −1)/h²` of size `n − 1` with
/// `h = 1/n`, and the samples of `√30·t(1 − t)` scaled to unit discrete
/// `L²` norm.
pub fn gen_fd_laplacian(n: usize) -> Result<ProblemBundle> {
    if n < 3 {
        return Err(Error::InvalidArgument("finite-difference grid needs n >= 3"));
    }
    let h = 1.0 / n as f64;
    let dim = n - 1;
    let d = 1.0 / (h * h);
    let m = DenseMatrix::from_fn(dim, dim, |i, j| match i.abs_diff(j) {
        0 => C64::new(2.0 * d, 0.0),
        1 => C64::new(-d, 0.0),
        _ => C64::new(0.0, 0.0),
    });
    let mut x: Vec<C64> = (1..n)
        .map(|i| {
            let t = i as f64 * h;
            C64::new(30f64.sqrt() * t * (1.0 - t), 0.0)
        })
        .collect();
    let l2 = (h * vector::norm_sq(&x)).sqrt();
    vector::scale(&mut x, C64::new(1.0 / l2, 0.0));
    let spectrum = (1..n).map(|k| 4.0 * d * (k as f64 * PI * h / 2.0).sin().powi(2)).collect();
    let mut b = ProblemBundle::new("fd-laplacian", Pencil::standard(m)?, PRecipe::Identity).with_constructed_spectrum(spectrum, true)?;
    b.trial = Some(x);
    b.facts.positive_definite = Some(true);
    Ok(b)
}

/// The block pencil `([[M11, M12], [M12ᴴ, M22]], [[0, 0], [0, N22]])` with
/// `P = Zᴴ·diag(I, N22⁻¹)·Z`, `Z = [[I, 0], [−M12ᴴM11⁻¹, I]]`.
pub fn gen_block_saddle(m11: &DenseMatrix, m12: &DenseMatrix, m22: &DenseMatrix, n22: &DenseMatrix) -> Result<ProblemBundle> {
    let n1 = m11.require_square()?;
    let n2 = m22.require_square()?;
    if n22.rows() != n2 || n22.cols() != n2 {
        return Err(Error::DimensionMismatch { expected: n2, found: n22.rows() });
    }
    if m12.rows() != n1 || m12.cols() != n2 {
        return Err(Error::DimensionMismatch { expected: n1, found: m12.rows() });
    }
    let lu11 = lu_factor(m11)?;
    let n22_factor = cholesky_spd(n22)?;
    let dim = n1 + n2;
    let m12h = m12.adjoint();
    let m = DenseMatrix::from_fn(dim, dim, |i, j| match (i < n1, j < n1) {
        (true, true) => m11[(i, j)],
        (true, false) => m12[(i, j - n1)],
        (false, true) => m12h[(i - n1, j)],
        (false, false) => m22[(i - n1, j - n1)],
    });
    let n = DenseMatrix::from_fn(dim, dim, |i, j| if i >= n1 && j >= n1 { n22[(i - n1, j - n1)] } else { C64::new(0.0, 0.0) });
    // C = −M12ᴴM11⁻¹, row by row from M11ᴴ Cᴴ = −M12.
    let ch: Vec<Vec<C64>> = m12.columns().iter().map(|c| vector::scaled(&lu11.solve_adjoint(c), C64::new(-1.0, 0.0))).collect();
    let c = DenseMatrix::from_columns(&ch).adjoint();
    let z = DenseMatrix::from_fn(dim, dim, |i, j| match (i < n1, j < n1) {
        (true, true) | (false, false) if i == j => C64::new(1.0, 0.0),
        (false, true) => c[(i - n1, j)],
        _ => C64::new(0.0, 0.0),
    });
    let n22_inv = n22_factor.inverse();
    let d = DenseMatrix::from_fn(dim, dim, |i, j| match (i < n1, j < n1) {
        (true, true) if i == j => C64::new(1.0, 0.0),
        (false, false) => n22_inv[(i - n1, j - n1)],
        _ => C64::new(0.0, 0.0),
    });
    let p = z.adjoint().matmul(&d).matmul(&z).hermitian_part();
    let pencil = Pencil::new(m, n)?;
    let ip = InnerProduct::explicit(p.clone())?;
    let check = check_self_adjoint(&pencil, &ip, SELF_ADJOINT_TOL);
    if !check.passed {
        return Err(Error::NotSelfAdjoint { residual: check.residual });
    }
    let b = ProblemBundle::new("block-saddle", pencil, PRecipe::Explicit(p));
    match b.clone().with_oracle_spectrum() {
        Ok(b) => Ok(b),
        Err(_) => Ok(b),
    }
}

/// Random Hermitian blocks with `M11` and `N22` safely invertible.
pub fn gen_random_block_saddle(seed: u64, n1: usize, n2: usize) -> Result<ProblemBundle> {
    let mut rng = random::seeded(seed);
    let herm = |rng: &mut random::Rng, k: usize, shift: f64| {
        let g = random::gaussian_matrix(rng, k, k, true);
        g.add_scaled(C64::new(1.0, 0.0), &g.adjoint())
            .scaled(C64::new(0.5, 0.0))
            .add_scaled(C64::new(shift, 0.0), &DenseMatrix::identity(k))
    };
    let m11 = herm(&mut rng, n1, 3.0 * (n1 as f64).sqrt());
    let m12 = random::gaussian_matrix(&mut rng, n1, n2, true);
    let m22 = herm(&mut rng, n2, 0.0);
    let g = random::gaussian_matrix(&mut rng, n2, n2, true);
    let n22 = g.matmul(&g.adjoint()).scaled(C64::new(1.0 / n2 as f64, 0.0)).add_scaled(C64::new(1.0, 0.0), &DenseMatrix::identity(n2));
    gen_block_saddle(&m11, &m12, &m22, &n22)
}

#[derive(Debug, Clone)]
pub struct RandomSpec {
    /// Prescribed real spectrum; its length is the dimension.
    pub spectrum: Vec<f64>,
    pub complex: bool,
    /// Random SPD `P` instead of the identity.
    pub random_p: bool,
    /// `N = I` instead of a random invertible `N`.
    pub standard: bool,
}

impl RandomSpec {
    pub fn new(spectrum: Vec<f64>) -> Self {
        Self { spectrum, complex: true, random_p: true, standard: false }
    }
}

/// Self-adjoint pencil with a prescribed spectrum.
///
/// With `P` and `N` drawn first, `Q` random unitary and `NᴴPN = LLᴴ`,
/// `M = N·L⁻ᴴ·QΛQᴴ·Lᴴ`, which makes `NᴴPM = L·QΛQᴴ·Lᴴ` Hermitian.
pub fn gen_random_selfadjoint(seed: u64, spec: &RandomSpec) -> Result<ProblemBundle> {
    let n = spec.spectrum.len();
    if n == 0 {
        return Err(Error::InvalidArgument("spectrum must be nonempty"));
    }
    let mut rng = random::seeded(seed);
    let scale = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let p = if spec.random_p {
        let g = random::gaussian_matrix(&mut rng, n, n, spec.complex).scaled(scale);
        g.matmul(&g.adjoint()).add_scaled(C64::new(1.0, 0.0), &DenseMatrix::identity(n)).hermitian_part()
    } else {
        DenseMatrix::identity(n)
    };
    let nm = if spec.standard {
        DenseMatrix::identity(n)
    } else {
        random::gaussian_matrix(&mut rng, n, n, spec.complex).scaled(scale).add_scaled(C64::new(2.0, 0.0), &DenseMatrix::identity(n))
    };
    let q = random::random_unitary(&mut rng, n, spec.complex);
    let lambda = DenseMatrix::from_real_diag(&spec.spectrum);
    let core = q.matmul(&lambda).matmul(&q.adjoint());
    let pprime = nm.adjoint().matmul(&p).matmul(&nm).hermitian_part();
    let l = cholesky_spd(&pprime)?;
    let k = core.matmul(&l.lower().adjoint());
    let s_cols: Vec<Vec<C64>> = k.columns().iter().map(|c| l.solve_lower_adjoint(c)).collect();
    let m = nm.matmul(&DenseMatrix::from_columns(&s_cols));
    let recipe = if spec.random_p { PRecipe::Explicit(p) } else { PRecipe::Identity };
    let pencil = Pencil::new(m, nm)?;
    let mut b = ProblemBundle::new("random-selfadjoint", pencil, recipe).with_constructed_spectrum(spec.spectrum.clone(), true)?;
    b.facts.positive_definite = Some(spec.spectrum.iter().all(|&v| v > 0.0));
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBoundParams {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Band `[lo, hi]`; `lo` itself is an eigenvalue.
    pub band: (f64, f64),
    /// Apply a random unitary congruence to the diagonal core.
    pub rotate: bool,
}

impl Default for TwoBoundParams {
    fn default() -> Self {
        Self { lambda1: 0.5, lambda2: 0.99995, band: (1.0, 4.0), rotate: true }
    }
}

/// Two isolated eigenvalues below a band of `n − 2` eigenvalues accumulating
/// quadratically at its lower edge. `N` is a random diagonal mass scaled by
/// the same congruence as `M`.
pub fn gen_two_bound_states(n: usize, params: &TwoBoundParams, seed: u64) -> Result<ProblemBundle> {
    let (lo, hi) = params.band;
    if n < 4 {
        return Err(Error::InvalidArgument("two bound states need n >= 4"));
    }
    if !(params.lambda1 < params.lambda2 && params.lambda2 < lo && lo < hi && params.lambda1 > 0.0) {
        return Err(Error::InvalidArgument("need 0 < lambda1 < lambda2 < band edge < band top"));
    }
    let mut spectrum = alloc::vec![params.lambda1, params.lambda2];
    let k = (n - 3) as f64;
    spectrum.extend((0..n - 2).map(|i| lo + (hi - lo) * (i as f64 / k).powi(2)));
    let mut rng = random::seeded(seed);
    let mass: Vec<f64> = (0..n).map(|_| random::uniform(&mut rng, 0.5, 2.0)).collect();
    let dm: Vec<f64> = spectrum.iter().zip(&mass).map(|(l, d)| l * d).collect();
    let (mut m, mut nm) = (DenseMatrix::from_real_diag(&dm), DenseMatrix::from_real_diag(&mass));
    if params.rotate {
        let q = random::random_unitary(&mut rng, n, true);
        m = q.matmul(&m).matmul(&q.adjoint()).hermitian_part();
        nm = q.matmul(&nm).matmul(&q.adjoint()).hermitian_part();
    }
    let bundle = ProblemBundle::new("two-bound-states", Pencil::new(m, nm)?, PRecipe::InverseM);
    let mut b = bundle.with_constructed_spectrum(spectrum, true)?;
    b.facts.positive_definite = Some(true);
    Ok(b)
}
