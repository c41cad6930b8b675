//! Run specifications and the solve / estimate / compare drivers.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use quotient_core::descent::{preconditioned_descent, DeflationSet, DescentConfig, DescentOutcome, Preconditioner};
use quotient_core::iterations::{
    optimal_quotient_iteration, rayleigh_quotient_iteration, smallest_pd_iteration, IterationConfig, IterationLog,
};
use quotient_core::midpoint::{psd_largest_estimate, random_rq_midpoint};
use quotient_core::quotients::{check_self_adjoint, check_self_adjoint_sampled, quotient_report, Moments};
use quotient_core::{random, Error as CoreError, InnerProduct, Pencil, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::problem::{LoadedProblem, PChoice, ProblemSource};

pub const SCHEMA_VERSION: u32 = 1;
/// Above this dimension the self-adjointness check is sampled.
pub const DENSE_CHECK_MAX_DIM: usize = 500;
pub const SELF_ADJOINT_TOL: f64 = 1e-8;
const SAMPLED_CHECK_COUNT: usize = 8;
const SAMPLED_CHECK_SEED: u64 = 0x5a;
/// Relative offset of the second-phase preconditioner shift from `λ₁`.
const DEFLATED_SHIFT_OFFSET: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Smallest,
    LargestPsd,
    Nearest(f64),
}

impl FromStr for Target {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smallest" => Ok(Self::Smallest),
            "largest-psd" => Ok(Self::LargestPsd),
            _ => s
                .strip_prefix("nearest=")
                .and_then(|z| z.parse().ok())
                .map(Self::Nearest)
                .ok_or_else(|| CliError::Usage(format!("--target expects smallest|largest-psd|nearest=ZETA, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuChoice {
    Value(f64),
    /// Midpoint of the Rayleigh quotients of `K` random vectors.
    AutoRandom(usize),
    /// Half the largest-eigenvalue estimate of a positive semidefinite pencil.
    AutoPsd,
}

impl FromStr for MuChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto-psd" {
            return Ok(Self::AutoPsd);
        }
        if let Some(k) = s.strip_prefix("auto-random:") {
            return k.parse().map(Self::AutoRandom).map_err(|_| CliError::Usage(format!("bad sample count in {s:?}")));
        }
        s.parse().map(Self::Value).map_err(|_| CliError::Usage(format!("--mu expects VALUE|auto-random:K|auto-psd, got {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecondChoice {
    Identity,
    InvM,
    Shifted,
}

impl FromStr for PrecondChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Self::Identity),
            "inv-m" => Ok(Self::InvM),
            "shifted" => Ok(Self::Shifted),
            _ => Err(CliError::Usage(format!("--precond expects identity|inv-m|shifted, got {s:?}"))),
        }
    }
}

fn default_eps() -> f64 {
    1e-10
}

fn default_max_iters() -> usize {
    50
}

fn default_descent_steps() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub source: ProblemSource,
    pub target: Target,
    /// Inner product for the self-adjointness check and the descent phase.
    #[serde(default = "default_p")]
    pub p: PChoice,
    /// Inner product for the iteration phase; defaults to `p`.
    #[serde(default)]
    pub iter_p: Option<PChoice>,
    #[serde(default)]
    pub mu: Option<MuChoice>,
    #[serde(default = "default_descent_steps")]
    pub descent_steps: usize,
    /// Steps for the deflated phase; defaults to `descent_steps`.
    #[serde(default)]
    pub deflated_steps: Option<usize>,
    /// Minimize over every direction generated so far.
    #[serde(default)]
    pub accumulate: bool,
    #[serde(default)]
    pub precond: Option<PrecondChoice>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub deflate_after_first: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

fn default_p() -> PChoice {
    PChoice::Default
}

impl RunSpec {
    pub fn new(source: ProblemSource, target: Target) -> Self {
        Self {
            source,
            target,
            p: PChoice::Default,
            iter_p: None,
            mu: None,
            descent_steps: default_descent_steps(),
            deflated_steps: None,
            accumulate: false,
            precond: None,
            eps: default_eps(),
            max_iters: default_max_iters(),
            seed: None,
            deflate_after_first: false,
            out: None,
            csv: None,
        }
    }

    /// Randomness is needed for random generators, `auto-random` shifts, a
    /// start without a trial vector and the second, deflated phase.
    fn needs_seed(&self, has_trial: bool) -> bool {
        self.source.uses_randomness() || matches!(self.mu, Some(MuChoice::AutoRandom(_))) || !has_trial || self.deflate_after_first
    }

    fn seed_for(&self, has_trial: bool) -> Result<u64> {
        match self.seed {
            Some(s) => Ok(s),
            None if !self.needs_seed(has_trial) => Ok(0),
            None => Err(CliError::Usage("this run draws random numbers; pass --seed".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRef {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInfo {
    pub name: String,
    pub dim: usize,
    pub p: String,
    pub iter_p: String,
    pub files: Vec<FileRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfAdjointnessRecord {
    pub method: String,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentRow {
    pub step: usize,
    pub objective: f64,
    pub rq_hat: f64,
    pub rq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentLog {
    pub mu: f64,
    pub preconditioner: String,
    pub accumulate: bool,
    pub steps: usize,
    pub stationary: bool,
    pub records: Vec<DescentRow>,
}

impl DescentLog {
    fn new(mu: f64, z: &Preconditioner, accumulate: bool, out: &DescentOutcome) -> Self {
        Self {
            mu,
            preconditioner: z.name().to_string(),
            accumulate,
            steps: out.steps,
            stationary: out.stationary,
            records: out.records.iter().map(|r| DescentRow { step: r.step, objective: r.objective, rq_hat: r.rq_hat, rq: r.rq }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub k: usize,
    pub l_re: f64,
    pub l_im: f64,
    pub sigma2: f64,
    pub quotient_estimate: f64,
    pub rq_estimate: f64,
    pub solve_near_singular: bool,
    pub shift_bumped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    OptimalQuotient,
    SmallestPd,
    /// Shift = Rayleigh quotient every step; not part of the method proper.
    RayleighBaseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::OptimalQuotient => "optimal-quotient",
            Self::SmallestPd => "smallest-pd",
            Self::RayleighBaseline => "rqi",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::RayleighBaseline => "invented baseline (classical RQI)",
            _ => "method",
        }
    }

    pub fn run(self, pencil: &Pencil, p: &InnerProduct, x0: &[C64], config: &IterationConfig) -> quotient_core::Result<IterationLog> {
        match self {
            Self::OptimalQuotient => optimal_quotient_iteration(pencil, p, x0, config),
            Self::SmallestPd => smallest_pd_iteration(pencil, p, x0, config),
            Self::RayleighBaseline => rayleigh_quotient_iteration(pencil, p, x0, config),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationSummary {
    pub method: Method,
    pub label: String,
    pub mu: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub records: Vec<IterationRow>,
}

impl IterationSummary {
    fn new(method: Method, mu: Option<f64>, log: &IterationLog) -> Self {
        Self {
            method,
            label: method.label().into(),
            mu,
            converged: log.converged,
            iterations: log.iterations,
            records: log
                .records
                .iter()
                .map(|r| IterationRow {
                    k: r.k,
                    l_re: r.l.re,
                    l_im: r.l.im,
                    sigma2: r.sigma2,
                    quotient_estimate: r.quotient_estimate,
                    rq_estimate: r.rq_estimate,
                    solve_near_singular: r.solve_near_singular,
                    shift_bumped: r.shift_bumped,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub label: String,
    /// `trial`, `random` or `deflated-random`.
    pub start: String,
    pub descent: Option<DescentLog>,
    pub iteration: Option<IterationSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub phase: String,
    /// Estimate from the iteration shift.
    pub lambda: f64,
    /// Rayleigh quotient at the final iterate.
    pub rq_estimate: f64,
    pub sigma2: f64,
    pub disc_radius: f64,
    pub inclusion_interval: (f64, f64),
    pub converged: bool,
    /// Nearest eigenvalue known to the generator, when available.
    pub reference: Option<f64>,
}

/// Wall-clock data, excluded from determinism comparisons.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load_s: f64,
    pub descent_s: Vec<f64>,
    pub iteration_s: Vec<f64>,
    /// Clock reading at each iteration record, per phase.
    pub iteration_clock_s: Vec<Vec<f64>>,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub spec: RunSpec,
    pub problem: Option<ProblemInfo>,
    pub self_adjointness: Option<SelfAdjointnessRecord>,
    pub mu: Option<f64>,
    pub phases: Vec<PhaseRecord>,
    pub eigenpairs: Vec<Eigenpair>,
    pub status: String,
    pub error: Option<String>,
    pub timings: Timings,
}

impl RunRecord {
    fn new(spec: &RunSpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            spec: spec.clone(),
            problem: None,
            self_adjointness: None,
            mu: None,
            phases: Vec::new(),
            eigenpairs: Vec::new(),
            status: "running".into(),
            error: None,
            timings: Timings::default(),
        }
    }

    /// The record with every timing field cleared.
    pub fn without_timings(&self) -> Self {
        Self { timings: Timings::default(), ..self.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A finished run; `failure` decides the exit code.
#[derive(Debug)]
pub struct Solved {
    pub record: RunRecord,
    pub failure: Option<CliError>,
}

impl Solved {
    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, CliError::exit_code)
    }
}

fn clock() -> f64 {
    static START: OnceLock<Instant> = OnceLock::new();
    START.get_or_init(Instant::now).elapsed().as_secs_f64()
}

fn iteration_config(spec: &RunSpec, mu: Option<f64>) -> IterationConfig {
    IterationConfig { epsilon: spec.eps, max_iters: spec.max_iters, mu, clock: Some(clock), ..IterationConfig::default() }
}

fn check_self_adjointness(pencil: &Pencil, p: &InnerProduct) -> SelfAdjointnessRecord {
    let (method, check) = if pencil.dim() <= DENSE_CHECK_MAX_DIM {
        ("dense", check_self_adjoint(pencil, p, SELF_ADJOINT_TOL))
    } else {
        ("sampled", check_self_adjoint_sampled(pencil, p, SELF_ADJOINT_TOL, SAMPLED_CHECK_COUNT, SAMPLED_CHECK_SEED))
    };
    SelfAdjointnessRecord { method: method.into(), residual: check.residual, tol: SELF_ADJOINT_TOL, passed: check.passed }
}

fn nearest_reference(loaded: &LoadedProblem, lambda: f64) -> Option<f64> {
    loaded.bundle.facts.spectrum.as_ref()?.iter().copied().min_by(|a, b| (a - lambda).abs().total_cmp(&(b - lambda).abs()))
}

fn eigenpair(phase: &str, pencil: &Pencil, p: &InnerProduct, log: &IterationLog, loaded: &LoadedProblem) -> Result<Eigenpair> {
    let report = quotient_report(pencil, p, &log.x, None, true)?;
    Ok(Eigenpair {
        phase: phase.into(),
        lambda: log.estimate,
        rq_estimate: log.rq_estimate,
        sigma2: log.records.last().map_or(f64::NAN, |r| r.sigma2),
        disc_radius: report.disc_radius,
        inclusion_interval: report.inclusion_interval.unwrap_or((f64::NAN, f64::NAN)),
        converged: log.converged,
        reference: nearest_reference(loaded, log.estimate),
    })
}

/// Per-phase settings shared by both phases of a solve.
struct Plan {
    method: Method,
    mu: Option<f64>,
    descent_mu: f64,
}

fn plan(spec: &RunSpec, pencil: &Pencil, p_iter: &InnerProduct, x0: &[C64], seed: u64) -> Result<Plan> {
    let mu = match spec.mu.or(match spec.target {
        Target::Smallest => None,
        Target::LargestPsd => Some(MuChoice::AutoPsd),
        Target::Nearest(z) => Some(MuChoice::Value(z)),
    }) {
        None => None,
        Some(MuChoice::Value(v)) => Some(v),
        Some(MuChoice::AutoRandom(k)) => Some(random_rq_midpoint(pencil, p_iter, k, seed ^ 0xa11)?),
        Some(MuChoice::AutoPsd) => Some(psd_largest_estimate(pencil, p_iter, x0)?.estimate() / 2.0),
    };
    let method = if mu.is_some() { Method::OptimalQuotient } else { Method::SmallestPd };
    let descent_mu = match spec.target {
        Target::Smallest => 0.0,
        Target::LargestPsd => 2.0 * mu.unwrap_or(0.0),
        Target::Nearest(z) => z,
    };
    Ok(Plan { method, mu, descent_mu })
}

fn first_preconditioner(spec: &RunSpec, pencil: &Pencil, descent_mu: f64) -> Result<Preconditioner> {
    let choice = spec.precond.unwrap_or(match spec.target {
        Target::Smallest => PrecondChoice::InvM,
        Target::LargestPsd => PrecondChoice::Identity,
        Target::Nearest(_) => PrecondChoice::Shifted,
    });
    Ok(match choice {
        PrecondChoice::Identity => Preconditioner::Identity,
        PrecondChoice::InvM => Preconditioner::default_for(pencil, 0.0)?,
        PrecondChoice::Shifted => Preconditioner::shifted_inverse(pencil, descent_mu)?,
    })
}

fn random_start(n: usize, seed: u64) -> Vec<C64> {
    random::gaussian_vec(&mut random::seeded(seed), n)
}

/// Runs the descent and iteration phases described by `spec`.
pub fn solve(spec: &RunSpec) -> Solved {
    let t0 = Instant::now();
    let mut record = RunRecord::new(spec);
    let failure = solve_into(spec, &mut record).err();
    record.timings.total_s = t0.elapsed().as_secs_f64();
    record.status = match &failure {
        None => "converged".into(),
        Some(CliError::Core(CoreError::NonConvergence(_))) => "not-converged".into(),
        Some(CliError::Core(CoreError::NotSelfAdjoint { .. })) => "not-self-adjoint".into(),
        Some(_) => "error".into(),
    };
    record.error = failure.as_ref().map(ToString::to_string);
    Solved { record, failure }
}

fn run_iteration(
    record: &mut RunRecord,
    phase: &mut PhaseRecord,
    plan: &Plan,
    pencil: &Pencil,
    p: &InnerProduct,
    x0: &[C64],
    config: &IterationConfig,
) -> Result<IterationLog> {
    let t = Instant::now();
    let result = plan.method.run(pencil, p, x0, config);
    record.timings.iteration_s.push(t.elapsed().as_secs_f64());
    let stamps = |log: &IterationLog| log.records.iter().filter_map(|r| r.elapsed).collect();
    match &result {
        Ok(log) => record.timings.iteration_clock_s.push(stamps(log)),
        Err(CoreError::NonConvergence(log)) => record.timings.iteration_clock_s.push(stamps(log)),
        Err(_) => {}
    }
    match result {
        Ok(log) => {
            phase.iteration = Some(IterationSummary::new(plan.method, plan.mu, &log));
            Ok(log)
        }
        Err(CoreError::NonConvergence(log)) => {
            phase.iteration = Some(IterationSummary::new(plan.method, plan.mu, &log));
            Err(CoreError::NonConvergence(log).into())
        }
        Err(e) => Err(e.into()),
    }
}

fn solve_into(spec: &RunSpec, record: &mut RunRecord) -> Result<()> {
    let t = Instant::now();
    let loaded = spec.source.load()?;
    record.timings.load_s = t.elapsed().as_secs_f64();
    let pencil = &loaded.bundle.pencil;
    let n = pencil.dim();
    let p = spec.p.build(&loaded.bundle)?;
    let iter_choice = spec.iter_p.clone().unwrap_or_else(|| spec.p.clone());
    let p_iter = if spec.iter_p.is_some() { iter_choice.build(&loaded.bundle)? } else { p.clone() };
    record.problem = Some(ProblemInfo {
        name: loaded.bundle.name.clone(),
        dim: n,
        p: p.kind_name().into(),
        iter_p: p_iter.kind_name().into(),
        files: loaded.files.iter().map(|(path, sha256)| FileRef { path: path.clone(), sha256: sha256.clone() }).collect(),
    });

    for ip in [&p, &p_iter] {
        let check = check_self_adjointness(pencil, ip);
        let residual = check.residual;
        let passed = check.passed;
        if record.self_adjointness.as_ref().is_none_or(|c| c.residual < residual) {
            record.self_adjointness = Some(check);
        }
        if !passed {
            return Err(CoreError::NotSelfAdjoint { residual }.into());
        }
    }

    let has_trial = loaded.bundle.trial.is_some();
    let seed = spec.seed_for(has_trial)?;
    let (x0, start) = match &loaded.bundle.trial {
        Some(t) => (t.clone(), "trial"),
        None => (random_start(n, seed), "random"),
    };
    let plan = plan(spec, pencil, &p_iter, &x0, seed)?;
    record.mu = plan.mu;
    let config = iteration_config(spec, plan.mu);

    let mut phase = PhaseRecord { label: "first".into(), start: start.into(), descent: None, iteration: None };
    let mut x = x0;
    if spec.descent_steps > 0 {
        let t = Instant::now();
        let z = first_preconditioner(spec, pencil, plan.descent_mu)?;
        let dc = DescentConfig { max_steps: spec.descent_steps, accumulate: spec.accumulate, ..DescentConfig::new(plan.descent_mu, z) };
        let out = preconditioned_descent(pencil, &p, &dc, &x, &DeflationSet::new(plan.descent_mu))?;
        record.timings.descent_s.push(t.elapsed().as_secs_f64());
        phase.descent = Some(DescentLog::new(plan.descent_mu, &dc.preconditioner, spec.accumulate, &out));
        x = out.x;
    }
    let first = run_iteration(record, &mut phase, &plan, pencil, &p_iter, &x, &config);
    record.phases.push(phase);
    let first = first?;
    record.eigenpairs.push(eigenpair("first", pencil, &p_iter, &first, &loaded)?);

    if spec.deflate_after_first {
        let mut phase = PhaseRecord { label: "deflated".into(), start: "deflated-random".into(), descent: None, iteration: None };
        let t = Instant::now();
        let mut set = DeflationSet::new(plan.descent_mu);
        set.push(pencil, &p, first.x.clone())?;
        let z = match spec.precond {
            Some(PrecondChoice::Identity) => Preconditioner::Identity,
            _ => Preconditioner::shifted_inverse(pencil, first.estimate * (1.0 + DEFLATED_SHIFT_OFFSET))?,
        };
        let steps = spec.deflated_steps.unwrap_or(spec.descent_steps);
        let dc = DescentConfig { max_steps: steps, accumulate: spec.accumulate, ..DescentConfig::new(plan.descent_mu, z) };
        let out = preconditioned_descent(pencil, &p, &dc, &random_start(n, seed.wrapping_add(1)), &set)?;
        record.timings.descent_s.push(t.elapsed().as_secs_f64());
        phase.descent = Some(DescentLog::new(plan.descent_mu, &dc.preconditioner, spec.accumulate, &out));
        let second = run_iteration(record, &mut phase, &plan, pencil, &p_iter, &out.x, &config);
        record.phases.push(phase);
        record.eigenpairs.push(eigenpair("deflated", pencil, &p_iter, &second?, &loaded)?);
    }
    Ok(())
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    use std::io::Write;
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Solves every spec, at most `threads` at a time, writing each log to its
/// `out` path. Results keep the input order.
pub fn run_batch(specs: &[RunSpec], threads: usize) -> Vec<Solved> {
    let threads = threads.max(1);
    let mut results: Vec<Option<Solved>> = (0..specs.len()).map(|_| None).collect();
    for (chunk_specs, chunk_out) in specs.chunks(threads).zip(results.chunks_mut(threads)) {
        std::thread::scope(|s| {
            for (spec, slot) in chunk_specs.iter().zip(chunk_out.iter_mut()) {
                s.spawn(move || {
                    let mut solved = solve(spec);
                    if let Some(out) = &spec.out {
                        let written = solved.record.to_json().and_then(|json| write_atomic(out, &json));
                        if let Err(e) = written {
                            solved.failure.get_or_insert(e);
                        }
                    }
                    *slot = Some(solved);
                });
            }
        });
    }
    results.into_iter().map(|r| r.expect("every batch slot filled")).collect()
}

fn csv_cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSpec {
    pub source: ProblemSource,
    #[serde(default = "default_p")]
    pub p: PChoice,
    /// `(lo, hi, count)`; by default `rq ± 3·radius` with 41 points.
    #[serde(default)]
    pub grid: Option<(f64, f64, usize)>,
    /// Extra shifts evaluated on top of the grid.
    #[serde(default)]
    pub mu: Vec<f64>,
    /// Used only without a trial vector.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub mu: f64,
    /// Empty at the discontinuity.
    pub qf: Option<f64>,
    /// `qf` is non-decreasing on this side of `rq`.
    pub monotone_ok: bool,
    pub left_limit: Option<f64>,
    pub right_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateTable {
    pub rq: f64,
    pub oq: f64,
    pub disc_center: f64,
    pub disc_radius: f64,
    pub rows: Vec<EstimateRow>,
}

impl EstimateTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("mu,qf,monotone_ok,left_limit,right_limit\n");
        for r in &self.rows {
            s += &format!("{},{},{},{},{}\n", r.mu, csv_cell(r.qf), r.monotone_ok, csv_cell(r.left_limit), csv_cell(r.right_limit));
        }
        s
    }

    pub fn summary(&self) -> String {
        format!("rq={} oq={} disc_center={} disc_radius={}", self.rq, self.oq, self.disc_center, self.disc_radius)
    }
}

/// `rq`, `oq`, the image disc and `qf` over a shift grid that always
/// contains `rq` itself, where the row carries the one-sided limits instead.
pub fn estimate(spec: &EstimateSpec) -> Result<EstimateTable> {
    let loaded = spec.source.load()?;
    let pencil = &loaded.bundle.pencil;
    let p = spec.p.build(&loaded.bundle)?;
    let x = match (&loaded.bundle.trial, spec.seed) {
        (Some(t), _) => t.clone(),
        (None, Some(seed)) => random_start(pencil.dim(), seed),
        (None, None) => return Err(CliError::Usage("no trial vector for this problem; pass --seed".into())),
    };
    let m = Moments::new(pencil, &p, &x)?;
    let oq = match m.optimal_quotient() {
        Ok(v) => v.re,
        Err(CoreError::PhaseUndefined) => f64::NAN,
        Err(e) => return Err(e.into()),
    };
    let rq = m.rq.re;
    let (lo, hi, count) = spec.grid.unwrap_or_else(|| {
        let w = if m.radius > 0.0 { 3.0 * m.radius } else { 1.0 };
        (rq - w, rq + w, 41)
    });
    let mut mus: Vec<f64> = match count {
        0 => Vec::new(),
        1 => vec![lo],
        c => (0..c).map(|i| lo + (hi - lo) * i as f64 / (c - 1) as f64).collect(),
    };
    mus.extend(&spec.mu);
    mus.push(rq);
    mus.sort_by(f64::total_cmp);
    mus.dedup();

    let (left, right, _) = m.limits();
    let scale = 1e-12 * (1.0 + rq.abs() + m.radius);
    let mut rows = Vec::with_capacity(mus.len());
    let mut prev: Option<(bool, f64)> = None;
    for mu in mus {
        match m.quotient_function(C64::new(mu, 0.0)) {
            Ok(q) => {
                let side = mu > rq;
                let monotone_ok = match prev {
                    Some((s, v)) if s == side => q.re >= v - scale,
                    _ => true,
                };
                prev = Some((side, q.re));
                rows.push(EstimateRow { mu, qf: Some(q.re), monotone_ok, left_limit: None, right_limit: None });
            }
            Err(CoreError::AtDiscontinuity { .. }) => {
                prev = None;
                rows.push(EstimateRow { mu, qf: None, monotone_ok: true, left_limit: Some(left.re), right_limit: Some(right.re) });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(EstimateTable { rq, oq, disc_center: rq, disc_radius: m.radius, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSpec {
    pub source: ProblemSource,
    #[serde(default = "default_p")]
    pub p: PChoice,
    /// Shift for the optimal quotient iteration; `auto-random:8` by default.
    #[serde(default)]
    pub mu: Option<MuChoice>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    pub runs: usize,
    pub seed: u64,
    /// Start run 0 from the generator's trial vector.
    #[serde(default)]
    pub use_trial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub run: usize,
    pub method: Method,
    pub label: String,
    pub iterations: usize,
    pub converged: bool,
    pub estimate: f64,
    pub rq_estimate: f64,
    pub error: Option<String>,
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut s = String::from("run,method,label,iterations,converged,estimate,rq_estimate,error\n");
    for r in rows {
        s += &format!(
            "{},{},{},{},{},{},{},{}\n",
            r.run,
            r.method.name(),
            r.label,
            r.iterations,
            r.converged,
            r.estimate,
            r.rq_estimate,
            r.error.as_deref().unwrap_or("").replace(',', ";")
        );
    }
    s
}

/// Mean iterations of the converged runs, per method.
pub fn compare_means(rows: &[CompareRow]) -> Vec<(Method, f64, usize)> {
    [Method::RayleighBaseline, Method::OptimalQuotient, Method::SmallestPd]
        .into_iter()
        .map(|m| {
            let its: Vec<usize> = rows.iter().filter(|r| r.method == m && r.converged).map(|r| r.iterations).collect();
            let mean = if its.is_empty() { f64::NAN } else { its.iter().sum::<usize>() as f64 / its.len() as f64 };
            (m, mean, its.len())
        })
        .collect()
}

/// Runs the baseline and both iterations from the same starts. Per-run
/// failures are recorded in the rows.
pub fn compare(spec: &CompareSpec) -> Result<Vec<CompareRow>> {
    let loaded = spec.source.load()?;
    let pencil = &loaded.bundle.pencil;
    let p = spec.p.build(&loaded.bundle)?;
    let n = pencil.dim();
    let mut rows = Vec::new();
    for run in 0..spec.runs {
        let x0 = match (&loaded.bundle.trial, run) {
            (Some(t), 0) if spec.use_trial => t.clone(),
            _ => random_start(n, spec.seed.wrapping_add(run as u64)),
        };
        let mu = match spec.mu.unwrap_or(MuChoice::AutoRandom(8)) {
            MuChoice::Value(v) => Ok(v),
            MuChoice::AutoRandom(k) => random_rq_midpoint(pencil, &p, k, spec.seed.wrapping_add(run as u64) ^ 0xa11),
            MuChoice::AutoPsd => psd_largest_estimate(pencil, &p, &x0).map(|c| c.estimate() / 2.0),
        };
        for method in [Method::RayleighBaseline, Method::OptimalQuotient, Method::SmallestPd] {
            let config = IterationConfig {
                epsilon: spec.eps,
                max_iters: spec.max_iters,
                mu: mu.as_ref().ok().copied(),
                ..IterationConfig::default()
            };
            let result = match (&mu, method) {
                (Err(e), Method::OptimalQuotient) => Err(e.clone()),
                _ => method.run(pencil, &p, &x0, &config),
            };
            let row = |log: &IterationLog, error: Option<String>| CompareRow {
                run,
                method,
                label: method.label().into(),
                iterations: log.iterations,
                converged: log.converged,
                estimate: log.estimate,
                rq_estimate: log.rq_estimate,
                error,
            };
            rows.push(match result {
                Ok(log) => row(&log, None),
                Err(CoreError::NonConvergence(log)) => row(&log, Some("not converged".into())),
                Err(e) => row(&IterationLog { estimate: f64::NAN, rq_estimate: f64::NAN, ..IterationLog::default() }, Some(e.to_string())),
            });
        }
    }
    Ok(rows)
}
