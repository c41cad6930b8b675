//! Acceptance runner: every criterion runs, prints one
//! `ACCEPTANCE <id> PASS|FAIL ...` line, and the process fails if any did.

#[path = "../../core/tests/props/mod.rs"]
mod props;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use quotient_cli::fixtures;
use quotient_cli::pipeline::{self, MuChoice, PrecondChoice, RunSpec, Target};
use quotient_cli::problem::{GenSpec, PChoice, ProblemSource};
use quotient_cli::selftest;
use quotient_core::generators::{gen_fd_laplacian, gen_forward_shift, gen_kungfood};
use quotient_core::linalg::pencil_eigs_oracle;
use quotient_core::midpoint::{midpoint_refine, swap_reformulate};
use quotient_core::quotients::{image_disc, Moments};
use quotient_core::{InnerProduct, C64};
use quotient_validation::Verdict;

fn c1_kungfood_golden_values() -> Verdict {
    let mut v = Verdict::default();
    let t0 = Instant::now();
    let b = gen_kungfood().unwrap();
    let p = InnerProduct::identity(3);
    let x = b.trial.clone().unwrap();
    let m = Moments::new(&b.pencil, &p, &x).unwrap();
    v.within("rq", m.rq.re, 5.0, 1e-14);
    v.within("oq", m.optimal_quotient().unwrap().re, (77.0f64 / 3.0).sqrt(), 1e-12);
    v.within("qf(2.533)", m.quotient_function(C64::new(2.533, 0.0)).unwrap().re, 5.1316, 5e-4);
    v.within("midpoint alpha", midpoint_refine(&b.pencil, &p, &x, 100, 1e-12).unwrap().alpha, 5.1333, 5e-4);
    let oracle = pencil_eigs_oracle(&b.pencil, &p).unwrap();
    for (got, want) in oracle.eigenvalues.iter().zip([1.3249, 2.4608, 5.2143]) {
        v.within("eigenvalue", *got, want, 5e-5);
    }
    v.runtime(t0.elapsed(), Duration::from_secs(1));
    v
}

fn c2_forward_shift_disc() -> Verdict {
    let mut v = Verdict::default();
    let t0 = Instant::now();
    for n in 3..=12usize {
        let b = gen_forward_shift(n, None).unwrap();
        let x = b.trial.clone().unwrap();
        let (c, r) = image_disc(&b.pencil, &InnerProduct::identity(n), &x).unwrap();
        let nf = n as f64;
        v.within(&format!("n={n} rq"), c.re, 1.0 - 1.0 / nf, 1e-12);
        v.within(&format!("n={n} radius"), r, (1.0 / nf + (nf - 1.0) / (nf * nf * nf)).sqrt(), 1e-12);
        v.check(format!("n={n} disc excludes 0"), c.norm() > r);
    }
    v.runtime(t0.elapsed(), Duration::from_secs(1));
    v
}

fn c3_fd_laplacian_limits() -> Verdict {
    let mut v = Verdict::default();
    let t0 = Instant::now();
    let b = gen_fd_laplacian(2000).unwrap();
    let x = b.trial.clone().unwrap();
    let p = InnerProduct::identity(b.dim());
    let swapped = swap_reformulate(&b.pencil).transformed;
    let inv = Moments::new(&swapped, &p, &x).unwrap();
    v.within("rq", quotient_core::quotients::rayleigh_quotient(&b.pencil, &p, &x).unwrap().re, 10.0, 0.02);
    v.within("1/rq(I,M)", 1.0 / inv.rq.re, 12.0, 0.05);
    v.within("1/oq(I,M)", 1.0 / inv.optimal_quotient().unwrap().re, 10.9545, 0.05);
    let alpha = midpoint_refine(&swapped, &p, &x, 100, 1e-12).unwrap().alpha;
    v.within("1/alpha(I,M)", 1.0 / alpha, 10.0, 0.02);
    v.runtime(t0.elapsed(), Duration::from_secs(5));
    v
}

fn c4_stiffness_mass_fixture() -> Verdict {
    let mut v = Verdict::default();
    let t0 = Instant::now();
    let located: Vec<_> = ["bcsstk13", "bcsstm13"].iter().map(|n| (n, fixtures::locate(n))).collect();
    for (name, f) in &located {
        match f {
            Ok(f) => v.check(format!("{name} at {} sha256={}", f.path.display(), f.sha256), true),
            Err(e) => v.check(format!("{name} unavailable ({e}); set {}", fixtures::FIXTURE_DIR_VAR), false),
        }
    }
    if located.iter().all(|(_, f)| f.is_ok()) {
        let source = ProblemSource::Fixture { m: "bcsstk13".into(), n: "bcsstm13".into() };
        let spec = RunSpec {
            p: PChoice::InvM,
            descent_steps: 3,
            precond: Some(PrecondChoice::InvM),
            seed: Some(1),
            ..RunSpec::new(source, Target::Smallest)
        };
        let solved = pipeline::solve(&spec);
        let rec = &solved.record;
        v.check(format!("status {}", rec.status), solved.failure.is_none());
        let descent_rq = rec.phases.first().and_then(|ph| ph.descent.as_ref()).and_then(|d| d.records.last()).map(|r| r.rq);
        match descent_rq {
            Some(d) => v.within("descent estimate", d, 148.66, 2.0),
            None => v.check("descent estimate missing", false),
        }
        match (rec.eigenpairs.first(), rec.phases.first().and_then(|ph| ph.iteration.as_ref())) {
            (Some(e), Some(it)) => {
                let want = 147.5340745961005;
                let rel = (e.lambda - want).abs() / want;
                v.check(format!("lambda1={:.13} rel err {rel:.2e} (≤ 1e-9)", e.lambda), rel <= 1e-9);
                v.check(format!("iterations {} (≤ 3)", it.iterations), it.iterations <= 3);
                v.check(format!("sigma2 {:.3e} (≤ 1e-10)", e.sigma2), e.sigma2 <= 1e-10);
            }
            _ => v.check("no eigenpair recorded", false),
        }
    }
    v.runtime(t0.elapsed(), Duration::from_secs(600));
    v
}

fn c5_two_bound_states() -> Verdict {
    let mut v = Verdict::default();
    let (mut recovered, mut adjacent, mut in_band) = (0, 0, 0);
    let mut notes = Vec::new();
    for seed in 0..20u64 {
        let gen = format!("two-bound-states:n=40,seed={seed}");
        let source = ProblemSource::Generator { spec: gen.clone() };
        let bundle = source.load().unwrap().bundle;
        let oracle = pencil_eigs_oracle(&bundle.pencil, &bundle.inner_product().unwrap()).unwrap();
        let (l1, l2, band_lo) = (oracle.eigenvalues[0], oracle.eigenvalues[1], oracle.eigenvalues[2]);
        let spec = RunSpec {
            p: PChoice::InvM,
            iter_p: Some(PChoice::InvN),
            mu: Some(MuChoice::Value(2.25)),
            descent_steps: 4,
            deflated_steps: Some(30),
            accumulate: true,
            seed: Some(seed),
            deflate_after_first: true,
            ..RunSpec::new(source, Target::Smallest)
        };
        let solved = pipeline::solve(&spec);
        let got: Vec<f64> = solved.record.eigenpairs.iter().map(|e| e.lambda).collect();
        let ok =
            solved.failure.is_none() && got.len() == 2 && (got[0] - l1).abs() <= 1e-8 * l1.abs() && (got[1] - l2).abs() <= 1e-8 * l2.abs();
        recovered += usize::from(ok);
        adjacent += usize::from((band_lo - l2).abs() <= 1e-4);
        in_band += got.iter().filter(|&&g| g >= band_lo * (1.0 - 1e-8)).count();
        if !ok {
            notes.push(format!("seed {seed}: got {got:?}, want [{l1}, {l2}]"));
        }
    }
    v.check(format!("recovered both {recovered}/20"), recovered == 20);
    v.check(format!("second adjacent to band {adjacent}/20"), adjacent == 20);
    v.check(format!("estimates in band {in_band}"), in_band == 0);
    for n in notes {
        v.check(n, false);
    }
    v
}

fn c6_property_suites() -> Verdict {
    let mut v = Verdict::default();
    let t0 = Instant::now();
    let instances = 60u64;
    for prop in props::PROPERTIES {
        let failures: Vec<String> = (0..instances)
            .filter_map(|seed| {
                let n = props::dim_for(seed, prop.max_n);
                (prop.check)(seed, n).err().map(|e| format!("seed {seed} n {n}: {e}"))
            })
            .collect();
        let first = failures.first().map(|f| format!(" first: {f}")).unwrap_or_default();
        v.check(format!("{} {}/{instances}{first}", prop.name, instances as usize - failures.len()), failures.is_empty());
    }
    for line in selftest::appendix_b(instances as usize, 7) {
        v.check(line.to_string(), line.passed);
    }
    v.runtime(t0.elapsed(), Duration::from_secs(300));
    v
}

/// Descent steps before the iterations in the convergence-speed suite; the
/// smallest count tried (1, 2, 3, 5, 8, 12, 20) reaching the 90% share.
const SPEED_DESCENT_STEPS: usize = 12;

fn c7_convergence_speed() -> Verdict {
    let mut v = Verdict::default();
    let (mut runs, mut fast) = (0usize, 0usize);
    let mut contraction_failures = Vec::new();
    for seed in 0..100u64 {
        let n = props::dim_for(seed, 30);
        let bundle = format!("random:seed={seed},n={n},psd=true").parse::<GenSpec>().unwrap().build().unwrap();
        let e = pencil_eigs_oracle(&bundle.pencil, &bundle.inner_product().unwrap()).unwrap().eigenvalues;
        let gap = (e[1] - e[0]) / (e[n - 1] - e[0]);
        match props::convergence_speed(&bundle, seed, SPEED_DESCENT_STEPS) {
            Ok(results) => {
                for r in results {
                    runs += 1;
                    fast += usize::from(r.iterations.is_some_and(|k| k <= 3));
                    if let Err(e) = r.contraction {
                        contraction_failures.push(format!("seed {seed} n {n} {} relative gap {gap:.1e}: {e}", r.method));
                    }
                }
            }
            Err(e) => {
                runs += 2;
                contraction_failures.push(format!("seed {seed}: {e}"));
            }
        }
    }
    let share = fast as f64 / runs as f64;
    v.check(
        format!("descent {SPEED_DESCENT_STEPS} steps, converged in ≤ 3 iterations {fast}/{runs} ({:.1}%, need ≥ 90%)", 100.0 * share),
        share >= 0.9,
    );
    v.check(format!("s₂ ≤ s₁² violations {}/{runs}", contraction_failures.len()), contraction_failures.is_empty());
    for f in contraction_failures.iter().take(5) {
        v.check(f.clone(), false);
    }
    v
}

type Criterion = (&'static str, fn() -> Verdict);

const CRITERIA: &[Criterion] = &[
    ("C1", c1_kungfood_golden_values),
    ("C2", c2_forward_shift_disc),
    ("C3", c3_fd_laplacian_limits),
    ("C4", c4_stiffness_mass_fixture),
    ("C5", c5_two_bound_states),
    ("C6", c6_property_suites),
    ("C7", c7_convergence_speed),
];

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for &(id, run) in CRITERIA {
        if !filter.is_empty() && !filter.iter().any(|f| id.eq_ignore_ascii_case(f)) {
            continue;
        }
        let line = match panic::catch_unwind(AssertUnwindSafe(run)) {
            Ok(v) => {
                if !v.passed() {
                    failed.push(id);
                }
                v.to_string()
            }
            Err(_) => {
                failed.push(id);
                "FAIL panicked".to_string()
            }
        };
        println!("ACCEPTANCE {id} {line}");
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
