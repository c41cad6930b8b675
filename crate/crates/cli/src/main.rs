use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quotient_cli::error::{CliError, Result};
use quotient_cli::fixtures;
use quotient_cli::pipeline::{self, CompareSpec, EstimateSpec, MuChoice, PrecondChoice, RunRecord, RunSpec, Solved, Target};
use quotient_cli::problem::{PChoice, ProblemSource};
use quotient_cli::selftest;

#[derive(Parser)]
#[command(name = "quotient", version, about = "Quotient-function eigenvalue estimates for self-adjoint pencils")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Matrix Market file for M.
    #[arg(long, conflicts_with_all = ["gen", "fixture"])]
    m: Option<PathBuf>,
    /// Matrix Market file for N (identity when omitted).
    #[arg(long, requires = "m")]
    n: Option<PathBuf>,
    /// Generator, NAME[:key=value,...].
    #[arg(long, conflicts_with = "fixture")]
    gen: Option<String>,
    /// Fixture pair from the manifest, M_NAME,N_NAME.
    #[arg(long)]
    fixture: Option<String>,
    /// identity | inv-m | inv-n | file=PATH (default: the problem's recipe).
    #[arg(long, default_value = "default")]
    p: String,
}

impl SourceArgs {
    fn source(&self) -> Result<ProblemSource> {
        match (&self.m, &self.gen, &self.fixture) {
            (Some(m), None, None) => Ok(ProblemSource::Files { m: m.clone(), n: self.n.clone() }),
            (None, Some(g), None) => Ok(ProblemSource::Generator { spec: g.clone() }),
            (None, None, Some(f)) => {
                let (m, n) = f.split_once(',').ok_or_else(|| CliError::Usage("--fixture expects M_NAME,N_NAME".into()))?;
                Ok(ProblemSource::Fixture { m: m.into(), n: n.into() })
            }
            _ => Err(CliError::Usage("give exactly one of --m, --gen or --fixture".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print rq, oq, the image disc and qf over a shift grid.
    Estimate {
        #[command(flatten)]
        source: SourceArgs,
        /// Extra shift; may be repeated.
        #[arg(long, allow_hyphen_values = true)]
        mu: Vec<f64>,
        /// LO:HI:COUNT
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV destination (stdout when omitted).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Descent phase followed by a quotient iteration; writes a JSON log.
    Solve {
        #[command(flatten)]
        source: SourceArgs,
        /// Read the whole run specification from JSON instead of flags.
        #[arg(long, conflicts_with_all = ["m", "gen", "fixture"])]
        spec: Option<PathBuf>,
        /// smallest | largest-psd | nearest=ZETA
        #[arg(long, default_value = "smallest")]
        target: String,
        /// Inner product for the iteration phase.
        #[arg(long)]
        iter_p: Option<String>,
        /// VALUE | auto-random:K | auto-psd
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long, default_value_t = 3)]
        descent_steps: usize,
        #[arg(long)]
        deflated_steps: Option<usize>,
        #[arg(long)]
        accumulate: bool,
        /// identity | inv-m | shifted
        #[arg(long)]
        precond: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        #[arg(long, default_value_t = 50)]
        max_iters: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        deflate_after_first: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// σ₂ trajectory as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Rayleigh quotient baseline against both iterations from identical starts.
    Compare {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        #[arg(long, default_value_t = 50)]
        max_iters: usize,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        use_trial: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a JSON array of run specifications in parallel.
    Batch {
        file: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run a named self-test suite.
    Selftest {
        #[arg(default_value = "appendix-b")]
        suite: String,
        #[arg(long, default_value_t = 60)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Show where each manifest fixture resolves and its checksum.
    Fixtures,
}

fn emit(path: Option<&PathBuf>, contents: &str) -> Result<()> {
    match path {
        Some(p) => pipeline::write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn sigma2_csv(record: &RunRecord) -> String {
    let mut s = String::from("phase,k,sigma2,quotient_estimate,rq_estimate\n");
    for phase in &record.phases {
        for r in phase.iteration.iter().flat_map(|it| &it.records) {
            s += &format!("{},{},{},{},{}\n", phase.label, r.k, r.sigma2, r.quotient_estimate, r.rq_estimate);
        }
    }
    s
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize)> {
    let bad = || CliError::Usage(format!("--grid expects LO:HI:COUNT, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else { return Err(bad()) };
    Ok((lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?, count.parse().map_err(|_| bad())?))
}

fn finish_solve(solved: &Solved, out: Option<&PathBuf>, csv: Option<&PathBuf>) -> Result<()> {
    let json = solved.record.to_json()?;
    match out {
        Some(p) => pipeline::write_atomic(p, &json)?,
        None => println!("{json}"),
    }
    if let Some(c) = csv {
        pipeline::write_atomic(c, &sigma2_csv(&solved.record))?;
    }
    if let Some(e) = &solved.failure {
        log::error!("{e}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Estimate { source, mu, grid, seed, csv, out } => {
            let spec = EstimateSpec {
                source: source.source()?,
                p: source.p.parse()?,
                grid: grid.as_deref().map(parse_grid).transpose()?,
                mu,
                seed,
            };
            let table = pipeline::estimate(&spec)?;
            eprintln!("{}", table.summary());
            emit(csv.as_ref(), &table.to_csv())?;
            if let Some(o) = out {
                pipeline::write_atomic(&o, &serde_json::to_string_pretty(&table)?)?;
            }
            Ok(0)
        }
        Command::Solve {
            source,
            spec,
            target,
            iter_p,
            mu,
            descent_steps,
            deflated_steps,
            accumulate,
            precond,
            eps,
            max_iters,
            seed,
            deflate_after_first,
            out,
            csv,
        } => {
            let spec = match spec {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                    serde_json::from_str::<RunSpec>(&text)?
                }
                None => RunSpec {
                    p: source.p.parse()?,
                    iter_p: iter_p.as_deref().map(str::parse::<PChoice>).transpose()?,
                    mu: mu.as_deref().map(str::parse::<MuChoice>).transpose()?,
                    descent_steps,
                    deflated_steps,
                    accumulate,
                    precond: precond.as_deref().map(str::parse::<PrecondChoice>).transpose()?,
                    eps,
                    max_iters,
                    seed,
                    deflate_after_first,
                    out,
                    csv,
                    ..RunSpec::new(source.source()?, target.parse::<Target>()?)
                },
            };
            let solved = pipeline::solve(&spec);
            finish_solve(&solved, spec.out.as_ref(), spec.csv.as_ref())?;
            Ok(solved.exit_code())
        }
        Command::Compare { source, mu, eps, max_iters, runs, seed, use_trial, csv } => {
            let spec = CompareSpec {
                source: source.source()?,
                p: source.p.parse()?,
                mu: mu.as_deref().map(str::parse::<MuChoice>).transpose()?,
                eps,
                max_iters,
                runs,
                seed,
                use_trial,
            };
            let rows = pipeline::compare(&spec)?;
            for (method, mean, converged) in pipeline::compare_means(&rows) {
                eprintln!("{}: mean iterations {mean:.2} over {converged}/{runs} converged runs", method.name());
            }
            emit(csv.as_ref(), &pipeline::compare_csv(&rows))?;
            Ok(0)
        }
        Command::Batch { file, threads } => {
            let text = std::fs::read_to_string(&file).map_err(|e| CliError::io(&file, e))?;
            let specs: Vec<RunSpec> = serde_json::from_str(&text)?;
            let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let results = pipeline::run_batch(&specs, threads);
            let mut worst = 0;
            for (i, solved) in results.iter().enumerate() {
                let code = solved.exit_code();
                eprintln!("run {i}: {} (exit {code})", solved.record.status);
                if solved.record.spec.out.is_none() {
                    println!("{}", solved.record.to_json()?);
                }
                worst = worst.max(code);
            }
            Ok(worst)
        }
        Command::Selftest { suite, instances, seed } => {
            let lines = selftest::run_suite(&suite, instances, seed)?;
            for line in &lines {
                println!("{line}");
            }
            Ok(if lines.iter().all(|l| l.passed) { 0 } else { 1 })
        }
        Command::Fixtures => {
            for spec in fixtures::manifest()? {
                match fixtures::locate(&spec.name) {
                    Ok(f) => println!("{} {} sha256={}", spec.name, f.path.display(), f.sha256),
                    Err(e) => println!("{} missing: {e} (source: {})", spec.name, spec.source),
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
