//! Seeded property checks. Each check builds its own instance from a seed and
//! returns `Err` with a description when the property is violated.
//!
//! Shared by the proptest suite in this crate and the acceptance sweep in the
//! CLI crate.
#![allow(dead_code)]

use quotient_core::cayley::{cayley_norm_identity, distance_principle, pythagoras_defect, CayleyData};
use quotient_core::descent::{accumulate_subspace, deflate_vector, descent_direction, preconditioned_descent};
use quotient_core::descent::{DeflationSet, DescentConfig, HatPencil, Preconditioner};
use quotient_core::generators::{gen_random_selfadjoint, ProblemBundle, RandomSpec};
use quotient_core::iterations::{alignment_objective, hermitian_system_check, optimal_quotient_iteration, optimal_z};
use quotient_core::iterations::{smallest_pd_iteration, IterationConfig, IterationLog};
use quotient_core::linalg::{cholesky_spd, hermitian_eigs, pencil_eigs_oracle, singular_values, vector};
use quotient_core::midpoint::{midpoint_refine, negated_shift_reformulate, psd_largest_estimate, shift_invert_reformulate};
use quotient_core::quotients::{arnoldi_disc_check, image_disc, lepo_bound, quotient_function, sqrt_identity_check, Moments};
use quotient_core::random::{self, Rng};
use quotient_core::{DenseMatrix, Error, InnerProduct, Pencil, C64};

pub type Check = Result<(), String>;

const ONE: C64 = C64::new(1.0, 0.0);

fn re(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

trait Ctx<T> {
    fn ctx(self, what: &str) -> Result<T, String>;
}

impl<T> Ctx<T> for Result<T, Error> {
    fn ctx(self, what: &str) -> Result<T, String> {
        self.map_err(|e| format!("{what}: {e}"))
    }
}

/// Sorted spectrum in `[lo, hi]` with gaps of at least `1e-2·(hi − lo)/n`.
fn spread_spectrum(rng: &mut Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let gap = 1e-2 * (hi - lo) / n as f64;
    let mut s: Vec<f64> = (0..n).map(|_| random::uniform(rng, lo, hi - gap * n as f64)).collect();
    s.sort_by(f64::total_cmp);
    s.iter().enumerate().map(|(i, v)| v + gap * i as f64).collect()
}

/// Random self-adjoint pencil with a random `P`, complex for even seeds.
pub fn random_pencil(seed: u64, n: usize, lo: f64, hi: f64) -> Result<ProblemBundle, String> {
    let mut rng = random::seeded(seed ^ 0x9e37_79b9);
    let spectrum = spread_spectrum(&mut rng, n, lo, hi);
    let spec = RandomSpec { complex: seed.is_multiple_of(2), ..RandomSpec::new(spectrum) };
    gen_random_selfadjoint(seed, &spec).ctx("generator")
}

fn start_vector(seed: u64, n: usize) -> Vec<C64> {
    random::complex_gaussian_vec(&mut random::seeded(seed ^ 0x51a7), n)
}

/// Hermitian positive definite matrix with spectrum in `[lo, hi]`.
fn random_spd(rng: &mut Rng, n: usize, lo: f64, hi: f64, complex: bool) -> DenseMatrix {
    let q = random::random_unitary(rng, n, complex);
    let d: Vec<f64> = (0..n).map(|_| random::uniform(rng, lo, hi)).collect();
    q.matmul(&DenseMatrix::from_real_diag(&d)).matmul(&q.adjoint()).hermitian_part()
}

fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let one = |a: &[f64], b: &[f64]| a.iter().map(|x| b.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    one(a, b).max(one(b, a))
}

fn orthonormal(p: &InnerProduct, vs: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for v in vs {
        let mut q = v.clone();
        for _ in 0..2 {
            for b in &out {
                let c = p.inner(&q, b);
                vector::axpy(-c, b, &mut q);
            }
        }
        let n = p.norm(&q);
        vector::scale(&mut q, re(1.0 / n));
        out.push(q);
    }
    out
}

/// Sine of the largest principal angle between two Euclidean-orthonormal sets.
fn largest_angle_sine(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    let cols: Vec<Vec<C64>> = b
        .iter()
        .map(|v| {
            let mut r = v.clone();
            for q in a {
                let c = vector::inner(&r, q);
                vector::axpy(-c, q, &mut r);
            }
            r
        })
        .collect();
    singular_values(&DenseMatrix::from_columns(&cols)).into_iter().fold(0.0, f64::max)
}

/// `qf` increases strictly on a 200-point grid on each side of `rq` (skipping
/// `rq ± 1e-3`), agrees with the direct definition, and stays in the disc.
pub fn monotone_and_in_disc(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let x = start_vector(seed, n);
    let (center, radius) = image_disc(&b.pencil, &p, &x).ctx("disc")?;
    let rq = center.re;
    let w = 1.0 + 3.0 * radius;
    let mut prev: Option<(bool, f64)> = None;
    for i in 0..200 {
        let mu = rq - w + 2.0 * w * i as f64 / 199.0;
        if (mu - rq).abs() < 1e-3 {
            prev = None;
            continue;
        }
        let q = quotient_function(&b.pencil, &p, &x, re(mu)).ctx("qf")?;
        let direct = quotient_function_direct(&b.pencil, &p, &x, mu)?;
        ensure((q - direct).norm() <= 1e-8 * (1.0 + direct.norm()), || format!("closed form {q} vs direct {direct} at {mu}"))?;
        ensure((q - center).norm() <= radius + 1e-10, || format!("qf({mu}) = {q} outside disc ({center}, {radius})"))?;
        let side = mu > rq;
        if let Some((s, v)) = prev {
            if s == side {
                ensure(q.re > v, || format!("qf not increasing at {mu}: {} after {v}", q.re))?;
            }
        }
        prev = Some((side, q.re));
    }
    Ok(())
}

/// `oq(M − μN, N)(x) + μ` from its definition.
fn quotient_function_direct(pencil: &Pencil, p: &InnerProduct, x: &[C64], mu: f64) -> Result<C64, String> {
    let shifted = pencil.shifted(re(mu));
    let m = Moments::new(&shifted, p, x).ctx("moments")?;
    Ok(m.optimal_quotient().ctx("oq")? + mu)
}

/// Some eigenvalue lies within the disc radius of `rq`.
pub fn inclusion(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let oracle = pencil_eigs_oracle(&b.pencil, &p).ctx("oracle")?;
    for k in 0..5 {
        let x = start_vector(seed.wrapping_add(k), n);
        let (center, radius) = image_disc(&b.pencil, &p, &x).ctx("disc")?;
        let d = oracle.distance(center);
        ensure(d <= radius + 1e-10, || format!("nearest eigenvalue at {d}, radius {radius}"))?;
    }
    Ok(())
}

/// The distance from `μ` to the spectrum is at most the bound, for real and
/// complex `μ`; at `μ = rq` the bound is the disc radius.
pub fn distance_bound(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let oracle = pencil_eigs_oracle(&b.pencil, &p).ctx("oracle")?;
    let mut rng = random::seeded(seed ^ 0xb0);
    let x = start_vector(seed, n);
    let (center, radius) = image_disc(&b.pencil, &p, &x).ctx("disc")?;
    let at_rq = lepo_bound(&b.pencil, &p, &x, center).ctx("bound")?;
    ensure((at_rq - radius).abs() <= 1e-10 * (1.0 + radius), || format!("bound at rq {at_rq} vs radius {radius}"))?;
    for _ in 0..10 {
        let mu = C64::new(random::uniform(&mut rng, -8.0, 8.0), random::uniform(&mut rng, -2.0, 2.0));
        for mu in [mu, re(mu.re)] {
            let bound = lepo_bound(&b.pencil, &p, &x, mu).ctx("bound")?;
            let d = oracle.distance(mu);
            ensure(d <= bound + 1e-10, || format!("distance {d} exceeds bound {bound} at {mu}"))?;
        }
    }
    Ok(())
}

/// For `μ > rq` closer to `λ_n` than to `λ₁`, `qf(μ)` is no farther from `λ₁`
/// than `rq` is.
pub fn midpoint_improvement(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let oracle = pencil_eigs_oracle(&b.pencil, &p).ctx("oracle")?;
    let (l1, ln) = (oracle.min().unwrap(), oracle.max().unwrap());
    let mut rng = random::seeded(seed ^ 0xc3);
    for k in 0..5 {
        let x = start_vector(seed.wrapping_add(k), n);
        let m = Moments::new(&b.pencil, &p, &x).ctx("moments")?;
        let rq = m.rq.re;
        let mu = rq.max((l1 + ln) / 2.0) + random::uniform(&mut rng, 1e-2, 3.0);
        let q = m.quotient_function(re(mu)).ctx("qf")?;
        ensure((l1 - q).norm() <= (l1 - rq).abs() + 1e-12, || {
            format!("|λ₁ − qf| = {} > |λ₁ − rq| = {}", (l1 - q).norm(), (l1 - rq).abs())
        })?;
    }
    Ok(())
}

/// On positive definite pencils `rq < oq ≤ qf(oq/2) ≤ α ≤ λ_n` with the
/// refinement nondecreasing.
pub fn psd_chain(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, 0.1, 10.0)?;
    let p = b.inner_product().ctx("P")?;
    let ln = pencil_eigs_oracle(&b.pencil, &p).ctx("oracle")?.max().unwrap();
    let x = start_vector(seed, n);
    let chain = psd_largest_estimate(&b.pencil, &p, &x).ctx("chain")?;
    ensure(chain.chain_holds, || format!("chain flag unset: {chain:?}"))?;
    ensure(chain.rq < chain.oq && chain.oq < chain.alpha, || format!("not strict: {chain:?}"))?;
    ensure(chain.alpha <= ln + 1e-10, || format!("alpha {} above λ_n {ln}", chain.alpha))?;
    let state = midpoint_refine(&b.pencil, &p, &x, 100, 1e-12).ctx("refine")?;
    for w in state.alphas.windows(2) {
        ensure(w[1] >= w[0] - 1e-12 * w[0].abs(), || format!("refinement decreased: {w:?}"))?;
    }
    ensure(state.alphas.iter().all(|&a| a <= ln + 1e-10), || "refinement above λ_n".into())
}

/// `rq_{M,I}(x) = oq_{M^{1/2},I}(x)²`.
pub fn sqrt_identity(seed: u64, n: usize) -> Check {
    let mut rng = random::seeded(seed);
    let m = random_spd(&mut rng, n, 0.1, 10.0, seed.is_multiple_of(2));
    let x = start_vector(seed, n);
    let (rq, oq2) = sqrt_identity_check(&m, &x).ctx("identity")?;
    ensure((rq - oq2).abs() <= 1e-10 * rq.abs(), || format!("rq {rq} vs oq² {oq2}"))
}

/// `Nᴴ·P·(M − lN)` is Hermitian for real `l`; not for a shear.
pub fn hermitian_system(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let mut rng = random::seeded(seed ^ 0xd4);
    for _ in 0..5 {
        let l = random::uniform(&mut rng, -10.0, 10.0);
        let d = hermitian_system_check(&b.pencil, &p, l);
        ensure(d <= 1e-10, || format!("defect {d} at l = {l}"))?;
    }
    let g = random::gaussian_matrix(&mut rng, n, n, true);
    let shear = Pencil::standard(g).ctx("pencil")?;
    let d = hermitian_system_check(&shear, &InnerProduct::identity(n), 0.5);
    ensure(d > 1e-3, || format!("non-self-adjoint control defect only {d}"))
}

/// `optimal_z` beats 1000 random `P`-unit vectors on the alignment objective,
/// for a random pair and for `(Mx, Nx)` of a random pencil.
pub fn alignment_maximizer(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let mut rng = random::seeded(seed ^ 0xe5);
    let unit = |v: Vec<C64>| {
        let s = p.norm(&v);
        vector::scaled(&v, re(1.0 / s))
    };
    let x = start_vector(seed, n);
    let pairs = [
        (unit(random::complex_gaussian_vec(&mut rng, n)), unit(random::complex_gaussian_vec(&mut rng, n))),
        (unit(b.pencil.apply_m(&x)), unit(b.pencil.apply_n(&x))),
    ];
    for (w1, w2) in &pairs {
        let z = optimal_z(&p, w1, w2);
        ensure((p.norm(&z) - 1.0).abs() < 1e-12, || "optimal z not unit".into())?;
        let best = alignment_objective(&p, &z, w1, w2);
        for _ in 0..1000 {
            let c = unit(random::complex_gaussian_vec(&mut rng, n));
            let v = alignment_objective(&p, &c, w1, w2);
            ensure(v <= best + 1e-12, || format!("random candidate {v} beats {best}"))?;
        }
    }
    Ok(())
}

/// Eigenvectors of distinct eigenvalues are orthogonal after applying
/// `M − μN`, in the `P`-inner product, for any real `μ`.
pub fn shifted_orthogonality(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let oracle = pencil_eigs_oracle(&b.pencil, &p).ctx("oracle")?;
    let mut rng = random::seeded(seed ^ 0xf6);
    let mu = random::uniform(&mut rng, -6.0, 6.0);
    let shifted = b.pencil.shifted_matrix(re(mu));
    let images: Vec<Vec<C64>> = (0..n).map(|i| shifted.matvec(&oracle.eigenvector(i))).collect();
    for i in 0..n {
        for j in 0..i {
            let c = p.inner(&images[i], &images[j]).norm() / (p.norm(&images[i]) * p.norm(&images[j]));
            ensure(c <= 1e-8, || format!("eigenvectors {i}, {j}: relative inner {c} at μ = {mu}"))?;
        }
    }
    Ok(())
}

/// With `N = I`, `μ = 0` and `Z = M⁻¹`, the accumulated basis spans
/// `{x, M⁻²x, …, M⁻²⁽ᵏ⁻¹⁾x}`.
pub fn krylov_span(seed: u64, n: usize) -> Check {
    let mut rng = random::seeded(seed);
    let m = random_spd(&mut rng, n, 1.0, 3.0, seed.is_multiple_of(2));
    let pencil = Pencil::standard(m.clone()).ctx("pencil")?;
    let ip = InnerProduct::identity(n);
    let z = Preconditioner::inverse_cholesky(m.clone()).ctx("Z")?;
    let hat = HatPencil::new(&pencil, 0.0, &z);
    let chol = cholesky_spd(&m).ctx("cholesky")?;
    let x = start_vector(seed, n);
    let k = 4.min(n);
    let out = accumulate_subspace(&hat, &ip, &x, k, 1e-13).ctx("accumulate")?;
    let k = out.basis.len();
    ensure(k >= 2, || "basis broke down at one vector".into())?;
    let mut powers = vec![x];
    while powers.len() < k {
        let last = powers.last().unwrap();
        powers.push(chol.solve(&chol.solve(last)));
    }
    let s = largest_angle_sine(&out.basis, &orthonormal(&ip, &powers));
    ensure(s <= 1e-8, || format!("largest principal angle sine {s} (k = {k})"))
}

/// The Cayley-transform identities on one random pencil.
pub fn cayley_identities(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let u = CayleyData::new(&b.pencil).ctx("cayley")?.unitarity_defect(&p, 5, seed);
    ensure(u <= 1e-8, || format!("unitarity defect {u}"))?;
    let (lhs, rhs) = cayley_norm_identity(&b.pencil, &p).ctx("norm identity")?;
    ensure((lhs - rhs).abs() <= 1e-6 * lhs.abs().max(1.0), || format!("norm identity {lhs} vs {rhs}"))?;
    let s = random::uniform(&mut random::seeded(seed ^ 0x17), -6.0, 6.0);
    let (inf, dist) = distance_principle(&b.pencil, &p, s).ctx("distance")?;
    ensure((inf - dist).abs() <= 1e-8 * dist.max(1.0), || format!("distance principle {inf} vs {dist} at {s}"))?;
    let py = pythagoras_defect(&b.pencil, &p, 5, seed);
    ensure(py <= 1e-10, || format!("pythagoras defect {py}"))
}

/// Directional derivatives of `‖(M − μN)x‖²_P/‖Nx‖²_P` match central
/// differences with step 1e-5.
pub fn gradient_matches_differences(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let mut rng = random::seeded(seed ^ 0x28);
    let mu = random::uniform(&mut rng, -3.0, 3.0);
    let x = start_vector(seed, n);
    let h = random::complex_gaussian_vec(&mut rng, n);
    let z = Preconditioner::Identity;
    let hat = HatPencil::new(&b.pencil, mu, &z);
    let f = |t: f64| hat.objective(&p, &vector::combine(ONE, &x, re(t), &h));
    let step = 1e-5;
    let fd = (f(step).ctx("f")? - f(-step).ctx("f")?) / (2.0 * step);
    let g = descent_direction(&b.pencil, &p, &x, mu).ctx("direction")?;
    let nn = p.norm_sq(&b.pencil.apply_n(&x));
    let analytic = 2.0 * vector::inner(&g, &h).re / nn;
    ensure((fd - analytic).abs() <= 1e-4 * analytic.abs().max(1e-8), || format!("analytic {analytic} vs difference {fd}"))
}

/// The descent objective never increases, plain or accumulated.
pub fn descent_monotone(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, 0.1, 10.0)?;
    let p = b.inner_product().ctx("P")?;
    let x = start_vector(seed, n);
    for accumulate in [false, true] {
        let z = Preconditioner::default_for(&b.pencil, 0.0).ctx("Z")?;
        let config = DescentConfig { max_steps: 6, accumulate, ..DescentConfig::new(0.0, z) };
        let out = preconditioned_descent(&b.pencil, &p, &config, &x, &DeflationSet::new(0.0)).ctx("descent")?;
        for w in out.records.windows(2) {
            ensure(w[1].objective <= w[0].objective * (1.0 + 1e-12) + 1e-12, || {
                format!("objective rose from {} to {} (accumulate {accumulate})", w[0].objective, w[1].objective)
            })?;
        }
    }
    Ok(())
}

/// `((M − μN)Z, NZ)` has the spectrum of `(M − μN, N)`.
pub fn preconditioning_equivalence(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let mut rng = random::seeded(seed ^ 0x39);
    let mu = random::uniform(&mut rng, -3.0, 3.0);
    let z = random::gaussian_matrix(&mut rng, n, n, seed.is_multiple_of(2))
        .scaled(re(1.0 / (n as f64).sqrt()))
        .add_scaled(re(2.0), &DenseMatrix::identity(n));
    let shifted = b.pencil.shifted_matrix(re(mu));
    let hat = Pencil::new(shifted.matmul(&z), b.pencil.n().matmul(&z)).ctx("hat")?;
    let a = pencil_eigs_oracle(&hat, &p).ctx("hat oracle")?.eigenvalues;
    let plain = pencil_eigs_oracle(&Pencil::new(shifted, b.pencil.n().clone()).ctx("pencil")?, &p).ctx("oracle")?.eigenvalues;
    let d = hausdorff(&a, &plain);
    ensure(d <= 1e-8, || format!("spectra differ by {d}"))
}

/// Deflating a random vector against eigenvectors leaves it orthogonal to
/// each of them after applying `M − μN`.
pub fn deflation_postcondition(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let oracle = pencil_eigs_oracle(&b.pencil, &p).ctx("oracle")?;
    let mu = 0.25;
    let mut set = DeflationSet::new(mu);
    for i in 0..3.min(n - 1) {
        set.push(&b.pencil, &p, oracle.eigenvector(i)).ctx("push")?;
    }
    let x = deflate_vector(&start_vector(seed, n), &set, &b.pencil, &p).ctx("deflate")?;
    let shifted = b.pencil.shifted_matrix(re(mu));
    let ax = shifted.matvec(&x);
    for v in set.vectors() {
        let av = shifted.matvec(v);
        let c = p.inner(&ax, &av).norm();
        ensure(c <= 1e-10 * p.norm(&ax) * p.norm(&av), || format!("residual inner {c}"))?;
    }
    Ok(())
}

/// Both reformulations map their spectra back onto the original one, and the
/// shift-invert extreme lands on the eigenvalue nearest `ζ`.
pub fn reformulations(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let spec = pencil_eigs_oracle(&b.pencil, &p).ctx("oracle")?.eigenvalues;
    let mut rng = random::seeded(seed ^ 0x4a);
    let i = (random::uniform(&mut rng, 0.0, (n - 1) as f64) as usize).min(n - 2);
    let zeta = spec[i] + random::uniform(&mut rng, 0.2, 0.8) * (spec[i + 1] - spec[i]);
    let r = spec[n - 1].max(0.0) + 1.0;
    for ref_ in [shift_invert_reformulate(&b.pencil, zeta).ctx("shift-invert")?, negated_shift_reformulate(&b.pencil, r).ctx("negated")?] {
        let t = pencil_eigs_oracle(&ref_.transformed, &p).ctx("transformed oracle")?.eigenvalues;
        let back: Vec<f64> = t.iter().map(|&l| ref_.map_back(l)).collect::<Result<_, _>>().ctx("map back")?;
        let d = hausdorff(&back, &spec);
        ensure(d <= 1e-8 * (1.0 + spec.iter().fold(0.0f64, |m, v| m.max(v.abs()))), || format!("{:?}: round trip off by {d}", ref_.kind))?;
        if let quotient_core::midpoint::ReformulationKind::ShiftInvert { .. } = ref_.kind {
            let extreme = t.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
            let mapped = ref_.map_back(extreme).ctx("map back")?;
            let nearest = spec.iter().copied().min_by(|a, b| (a - zeta).abs().total_cmp(&(b - zeta).abs())).unwrap();
            ensure((mapped - nearest).abs() <= 1e-8 * (1.0 + nearest.abs()), || format!("extreme maps to {mapped}, nearest is {nearest}"))?;
        }
    }
    Ok(())
}

/// One Arnoldi step reproduces the image disc for `N = P = I`.
pub fn arnoldi_disc(seed: u64, n: usize) -> Check {
    let mut rng = random::seeded(seed);
    let g = random::gaussian_matrix(&mut rng, n, n, true);
    let m = g.add_scaled(ONE, &g.adjoint());
    let x = start_vector(seed, n);
    let (h11, h21) = arnoldi_disc_check(&m, &x).ctx("arnoldi")?;
    let (c, r) = image_disc(&Pencil::standard(m).ctx("pencil")?, &InnerProduct::identity(n), &x).ctx("disc")?;
    ensure((h11 - c).norm() <= 1e-12 * (1.0 + c.norm()) && (h21 - r).abs() <= 1e-12 * (1.0 + r), || {
        format!("arnoldi ({h11}, {h21}) vs disc ({c}, {r})")
    })
}

/// Hermitian eigenpairs of random matrices have residuals below 1e-10‖A‖.
pub fn oracle_residuals(seed: u64, n: usize) -> Check {
    let mut rng = random::seeded(seed);
    let g = random::gaussian_matrix(&mut rng, n, n, seed.is_multiple_of(2));
    let a = g.add_scaled(ONE, &g.adjoint());
    let e = hermitian_eigs(&a).ctx("eigs")?;
    let scale = a.frobenius_norm();
    for (i, &l) in e.values.iter().enumerate() {
        let v = e.vector(i);
        let r = vector::norm(&vector::combine(ONE, &a.matvec(&v), re(-l), &v));
        ensure(r <= 1e-10 * scale, || format!("residual {r} for eigenvalue {l}"))?;
    }
    Ok(())
}

/// The pencil oracle agrees with eigenvalues of `L⁻¹·NᴴPM·L⁻ᴴ`, `NᴴPN = LLᴴ`.
pub fn oracle_congruence(seed: u64, n: usize) -> Check {
    let b = random_pencil(seed, n, -5.0, 5.0)?;
    let p = b.inner_product().ctx("P")?;
    let h = p.gram(b.pencil.n(), b.pencil.m()).hermitian_part();
    let l = cholesky_spd(&p.gram(b.pencil.n(), b.pencil.n())).ctx("cholesky")?;
    let cols: Vec<Vec<C64>> = h.columns().iter().map(|c| l.solve_lower(c)).collect();
    let half = DenseMatrix::from_columns(&cols).adjoint();
    let cols: Vec<Vec<C64>> = half.columns().iter().map(|c| l.solve_lower(c)).collect();
    let reduced = DenseMatrix::from_columns(&cols).hermitian_part();
    let direct = hermitian_eigs(&reduced).ctx("eigs")?.values;
    let oracle = pencil_eigs_oracle(&b.pencil, &p).ctx("oracle")?.eigenvalues;
    let d = hausdorff(&direct, &oracle);
    ensure(d <= 1e-9, || format!("congruence differs by {d}"))
}

/// `X·Λ·X⁻¹` is normal in the inner product built from `X`.
pub fn normalizing_product(seed: u64, n: usize) -> Check {
    let mut rng = random::seeded(seed);
    let x =
        random::gaussian_matrix(&mut rng, n, n, true).scaled(re(1.0 / (n as f64).sqrt())).add_scaled(re(1.5), &DenseMatrix::identity(n));
    let d: Vec<C64> = (0..n).map(|_| C64::new(random::uniform(&mut rng, -3.0, 3.0), random::uniform(&mut rng, -1.0, 1.0))).collect();
    let lu = quotient_core::linalg::lu_factor(&x).ctx("lu")?;
    let m = x.matmul(&DenseMatrix::from_diag(&d)).matmul(&lu.inverse());
    let p = quotient_core::linalg::normalizing_inner_product(&x).ctx("normalizing")?;
    let defect = quotient_core::linalg::normality_defect(&p, &m);
    ensure(defect <= 1e-8, || format!("normality defect {defect}"))?;
    let v = random::complex_gaussian_vec(&mut rng, n);
    ensure(p.norm(&v) > 0.0, || "P-norm of nonzero vector vanished".into())
}

/// Random self-adjoint pencil whose extremes are separated from the rest
/// and from zero.
fn separated(seed: u64, n: usize) -> Result<ProblemBundle, String> {
    let mut rng = random::seeded(seed ^ 0x5b);
    let mut spectrum = spread_spectrum(&mut rng, n - 2, 1.0, 4.0);
    spectrum.push(random::uniform(&mut rng, -2.0, -1.0));
    spectrum.push(random::uniform(&mut rng, 5.0, 6.0));
    let spec = RandomSpec { complex: seed.is_multiple_of(2), ..RandomSpec::new(spectrum) };
    gen_random_selfadjoint(seed, &spec).ctx("generator")
}

/// A start `0.05`-close to the eigenvector of `λ₁`.
fn near_eigenvector(seed: u64, bundle: &ProblemBundle, p: &InnerProduct) -> Result<(Vec<C64>, f64), String> {
    let oracle = pencil_eigs_oracle(&bundle.pencil, p).ctx("oracle")?;
    let v = oracle.eigenvector(0);
    let noise = start_vector(seed, v.len());
    let x = vector::combine(re(1.0 / p.norm(&v)), &v, re(0.05 / p.norm(&noise)), &noise);
    Ok((x, oracle.eigenvalues[0]))
}

/// Moving the midpoint shift by ±10% does not change the limit, and at exit
/// the residual is within ten times `ε` of the monitored scale.
pub fn shift_translation_and_monitor(seed: u64, n: usize) -> Check {
    let b = separated(seed, n)?;
    let p = b.inner_product().ctx("P")?;
    let (x0, l1) = near_eigenvector(seed, &b, &p)?;
    let mid = 2.5;
    let eps = 1e-10;
    let mut limits = Vec::new();
    for mu in [mid, 0.9 * mid, 1.1 * mid] {
        let config = IterationConfig { epsilon: eps, ..IterationConfig::with_mu(mu) };
        let log = optimal_quotient_iteration(&b.pencil, &p, &x0, &config).ctx("iteration")?;
        monitor_sound(&b.pencil, &p, &log, eps)?;
        limits.push(log.estimate);
    }
    ensure(limits.iter().all(|l| (l - l1).abs() <= 1e-8), || format!("limits {limits:?} vs λ₁ = {l1}"))
}

fn monitor_sound(pencil: &Pencil, p: &InnerProduct, log: &IterationLog, eps: f64) -> Check {
    let (mx, nx) = (pencil.apply_m(&log.x), pencil.apply_n(&log.x));
    let r = p.norm(&vector::combine(ONE, &mx, re(-log.estimate), &nx));
    let scale = p.norm(&mx) + log.estimate.abs() * p.norm(&nx);
    ensure(r <= 10.0 * eps * scale, || format!("residual {r} above 10·ε·{scale}"))
}

/// Smallest σ₂ that can be told apart from rounding error.
pub const SIGMA2_FLOOR: f64 = 100.0 * f64::EPSILON;

/// In a converged run whose second monitor value `s₁` is below 1e-2, the
/// third is at most `s₁²`.
pub fn sigma2_contraction(log: &IterationLog) -> Check {
    let s = log.sigma2_trajectory();
    if !log.converged || s.len() < 3 || s[1] >= 1e-2 {
        return Ok(());
    }
    ensure(s[2] <= (s[1] * s[1]).max(SIGMA2_FLOOR), || format!("σ₂ went from {:e} to {:e} (start {:e})", s[1], s[2], s[0]))
}

/// Outcome of one run of the convergence-speed suite.
#[derive(Debug, Clone)]
pub struct SpeedRun {
    pub method: &'static str,
    pub iterations: Option<usize>,
    pub contraction: Check,
}

/// Descent start (`μ = 0`, `Z = M⁻¹`, `steps` steps) on a positive definite
/// pencil, then both iterations with `ε = 1e-10`. The midpoint shift comes
/// from the oracle extremes.
pub fn convergence_speed(b: &ProblemBundle, seed: u64, steps: usize) -> Result<Vec<SpeedRun>, String> {
    let n = b.dim();
    let p = b.inner_product().ctx("P")?;
    let oracle = pencil_eigs_oracle(&b.pencil, &p).ctx("oracle")?;
    let mu = (oracle.min().unwrap() + oracle.max().unwrap()) / 2.0;
    let z = Preconditioner::default_for(&b.pencil, 0.0).ctx("Z")?;
    let config = DescentConfig { max_steps: steps, ..DescentConfig::new(0.0, z) };
    let x = preconditioned_descent(&b.pencil, &p, &config, &start_vector(seed, n), &DeflationSet::new(0.0)).ctx("descent")?.x;
    let config = IterationConfig { epsilon: 1e-10, ..IterationConfig::default() };
    let runs = [
        ("optimal-quotient", optimal_quotient_iteration(&b.pencil, &p, &x, &IterationConfig { mu: Some(mu), ..config })),
        ("smallest-pd", smallest_pd_iteration(&b.pencil, &p, &x, &config)),
    ];
    Ok(runs
        .into_iter()
        .map(|(method, r)| match r {
            Ok(log) => SpeedRun { method, iterations: Some(log.iterations), contraction: sigma2_contraction(&log) },
            Err(Error::NonConvergence(log)) => SpeedRun { method, iterations: None, contraction: sigma2_contraction(&log) },
            Err(e) => SpeedRun { method, iterations: None, contraction: fail(e.to_string()) },
        })
        .collect())
}

/// Named property with its instance-size rule.
pub struct Property {
    pub name: &'static str,
    pub check: fn(u64, usize) -> Check,
    pub max_n: usize,
}

/// The property suites, each meant to run on at least 50 seeds.
pub const PROPERTIES: &[Property] = &[
    Property { name: "quotient function monotone and inside its disc", check: monotone_and_in_disc, max_n: 30 },
    Property { name: "inclusion interval holds an eigenvalue", check: inclusion, max_n: 30 },
    Property { name: "distance bound for normal problems", check: distance_bound, max_n: 30 },
    Property { name: "midpoint shift improves on rq", check: midpoint_improvement, max_n: 30 },
    Property { name: "positive definite estimate chain", check: psd_chain, max_n: 30 },
    Property { name: "square-root identity", check: sqrt_identity, max_n: 30 },
    Property { name: "shifted system stays Hermitian", check: hermitian_system, max_n: 30 },
    Property { name: "optimal z beats 1000 random candidates", check: alignment_maximizer, max_n: 30 },
    Property { name: "shifted orthogonality of eigenvectors", check: shifted_orthogonality, max_n: 30 },
    Property { name: "accumulated span equals inverse-square powers", check: krylov_span, max_n: 12 },
    Property { name: "cayley identities", check: cayley_identities, max_n: 20 },
];

/// Dimension for seed `seed` under `max_n`, at least 3.
pub fn dim_for(seed: u64, max_n: usize) -> usize {
    3 + (seed as usize) % (max_n - 2)
}

pub fn fails<T>(r: &Result<T, String>) -> bool {
    r.is_err()
}
