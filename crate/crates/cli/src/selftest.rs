//! Named self-test suites runnable from the command line.

use quotient_core::cayley::{cayley_norm_identity, distance_principle, pythagoras_defect, CayleyData};
use quotient_core::generators::{gen_kungfood, gen_random_selfadjoint, RandomSpec};
use quotient_core::{random, DenseMatrix, InnerProduct, Pencil};

use crate::error::{CliError, Result};

pub const SUITES: &[&str] = &["appendix-b"];

/// One line of a suite report: the worst value seen against its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub instances: usize,
    pub worst: f64,
    pub bound: f64,
    pub passed: bool,
}

impl CheckLine {
    fn upper(name: &str, instances: usize, worst: f64, bound: f64) -> Self {
        Self { name: name.into(), instances, worst, bound, passed: worst <= bound }
    }
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} (n={}, worst={:.3e}, bound={:.1e})", self.name, self.instances, self.worst, self.bound)
    }
}

pub fn run_suite(name: &str, instances: usize, seed: u64) -> Result<Vec<CheckLine>> {
    match name {
        "appendix-b" => Ok(appendix_b(instances, seed)),
        other => Err(CliError::Usage(format!("unknown suite {other}; available: {}", SUITES.join(", ")))),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Cayley-transform identities on seeded random self-adjoint pencils with
/// `2 ≤ n ≤ 20`, plus fixed examples and a non-self-adjoint negative control.
/// An instance that cannot be evaluated counts as infinitely bad.
pub fn appendix_b(instances: usize, seed: u64) -> Vec<CheckLine> {
    let mut rng = random::seeded(seed);
    let (mut unitary, mut norm_id, mut distance, mut pyth) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut control = f64::INFINITY;
    for i in 0..instances {
        let n = 2 + (i % 19);
        let spectrum: Vec<f64> = (0..n).map(|_| random::uniform(&mut rng, -5.0, 5.0)).collect();
        let spec = RandomSpec { complex: i % 2 == 0, ..RandomSpec::new(spectrum) };
        let s = random::uniform(&mut rng, -6.0, 6.0);
        let case_seed = seed.wrapping_mul(1000).wrapping_add(i as u64);
        let evaluated = (|| -> quotient_core::Result<(f64, f64, f64, f64)> {
            let b = gen_random_selfadjoint(case_seed, &spec)?;
            let p = b.inner_product()?;
            let u = CayleyData::new(&b.pencil)?.unitarity_defect(&p, 8, case_seed);
            let (lhs, rhs) = cayley_norm_identity(&b.pencil, &p)?;
            let (inf, dist) = distance_principle(&b.pencil, &p, s)?;
            Ok((u, rel(lhs, rhs), (inf - dist).abs() / dist.max(1.0), pythagoras_defect(&b.pencil, &p, 8, case_seed)))
        })();
        let (u, ni, d, py) = evaluated.unwrap_or((f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY));
        unitary = unitary.max(u);
        norm_id = norm_id.max(ni);
        distance = distance.max(d);
        pyth = pyth.max(py);

        let g = random::gaussian_matrix(&mut rng, n, n, true);
        if let Ok(pencil) = Pencil::standard(g) {
            control = control.min(pythagoras_defect(&pencil, &InnerProduct::identity(n), 8, case_seed));
        }
    }

    let fixed = (|| -> quotient_core::Result<f64> {
        let diag = Pencil::standard(DenseMatrix::from_real_diag(&[1.0, 2.0]))?;
        let (a, b) = cayley_norm_identity(&diag, &InnerProduct::identity(2))?;
        let m = DenseMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let (c, d) = cayley_norm_identity(&Pencil::new(m.clone(), m)?, &InnerProduct::identity(2))?;
        let (at_eig, _) = distance_principle(&diag, &InnerProduct::identity(2), 2.0)?;
        Ok([(a - 1.0).abs(), (b - 1.0).abs(), (c - 1.0).abs(), (d - 1.0).abs(), at_eig].into_iter().fold(0.0, f64::max))
    })()
    .unwrap_or(f64::INFINITY);
    // Four-digit reference value.
    let kungfood = (|| -> quotient_core::Result<f64> {
        let k = gen_kungfood()?;
        let (inf, dist) = distance_principle(&k.pencil, &k.inner_product()?, 2.0)?;
        Ok((inf - 0.4608).abs().max((dist - 0.4608).abs()))
    })()
    .unwrap_or(f64::INFINITY);

    vec![
        CheckLine::upper("cayley transform is P-unitary", instances, unitary, 1e-8),
        CheckLine::upper("norm identity", instances, norm_id, 1e-6),
        CheckLine::upper("distance principle", instances, distance, 1e-8),
        CheckLine::upper("pythagoras identity", instances, pyth, 1e-10),
        CheckLine {
            name: "pythagoras fails without self-adjointness".into(),
            instances,
            worst: control,
            bound: 1e-6,
            passed: control > 1e-6,
        },
        CheckLine::upper("fixed examples", 3, fixed, 1e-10),
        CheckLine::upper("kungfood distance from 2", 1, kungfood, 5e-5),
    ]
}
