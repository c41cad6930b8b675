//! Problem sources: generator specs, Matrix Market files and fixtures.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use quotient_core::generators::{self, PRecipe, ProblemBundle, RandomSpec, TwoBoundParams};
use quotient_core::random;
use quotient_core::{DenseMatrix, InnerProduct, Pencil};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::fixtures;
use crate::mm::{self, DEFAULT_DENSE_CAP};

/// `NAME[:key=value,...]`
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl FromStr for GenSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = BTreeMap::new();
        for kv in rest.split(',').filter(|t| !t.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Usage(format!("generator parameter {kv:?} is not key=value")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { name: name.trim().to_string(), params })
    }
}

impl GenSpec {
    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| CliError::Usage(format!("{}: bad value {v:?} for {key}", self.name))),
        }
    }

    fn seed(&self) -> Result<u64> {
        self.params
            .get("seed")
            .ok_or_else(|| CliError::Usage(format!("generator {} needs seed=", self.name)))?
            .parse()
            .map_err(|_| CliError::Usage("seed must be an unsigned integer".into()))
    }

    /// Whether building this problem draws random numbers.
    pub fn is_random(&self) -> bool {
        matches!(self.name.as_str(), "random" | "block-saddle" | "two-bound-states")
    }

    pub fn build(&self) -> Result<ProblemBundle> {
        match self.name.as_str() {
            "kungfood" => Ok(generators::gen_kungfood()?),
            "forward-shift" => {
                let n = self.get("n", 5usize)?;
                let e: f64 = self.get("e", 0.0)?;
                let diag: Vec<f64> = (0..n).map(|i| e * (i + 1) as f64 / n as f64).collect();
                Ok(generators::gen_forward_shift(n, (e != 0.0).then_some(diag.as_slice()))?)
            }
            "fd-laplacian" => Ok(generators::gen_fd_laplacian(self.get("n", 2000usize)?)?),
            "random" => {
                let seed = self.seed()?;
                let n = self.get("n", 10usize)?;
                let lo = self.get("lo", if self.get("psd", false)? { 0.1 } else { -5.0 })?;
                let hi = self.get("hi", 10.0)?;
                let mut rng = random::seeded(seed ^ 0x5eed);
                let spectrum = (0..n).map(|_| random::uniform(&mut rng, lo, hi)).collect();
                let spec = RandomSpec {
                    spectrum,
                    complex: self.get("complex", true)?,
                    random_p: self.get("random-p", true)?,
                    standard: self.get("standard", false)?,
                };
                Ok(generators::gen_random_selfadjoint(seed, &spec)?)
            }
            "block-saddle" => Ok(generators::gen_random_block_saddle(self.seed()?, self.get("n1", 5)?, self.get("n2", 4)?)?),
            "two-bound-states" => {
                let d = TwoBoundParams::default();
                let params = TwoBoundParams {
                    lambda1: self.get("lambda1", d.lambda1)?,
                    lambda2: self.get("lambda2", d.lambda2)?,
                    band: (self.get("lo", d.band.0)?, self.get("hi", d.band.1)?),
                    rotate: self.get("rotate", d.rotate)?,
                };
                Ok(generators::gen_two_bound_states(self.get("n", 40)?, &params, self.seed()?)?)
            }
            other => Err(CliError::Usage(format!(
                "unknown generator {other}; expected kungfood, forward-shift, fd-laplacian, random, block-saddle or two-bound-states"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemSource {
    Generator {
        spec: String,
    },
    /// `N` defaults to the identity.
    Files {
        m: PathBuf,
        n: Option<PathBuf>,
    },
    /// Names from the fixture manifest.
    Fixture {
        m: String,
        n: String,
    },
}

/// A loaded problem with whatever is known about where it came from.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub bundle: ProblemBundle,
    /// `(path, sha256)` for every file read.
    pub files: Vec<(PathBuf, String)>,
}

fn file_bundle(name: &str, m: DenseMatrix, n: Option<DenseMatrix>) -> Result<ProblemBundle> {
    let pencil = match n {
        Some(n) => Pencil::new(m, n)?,
        None => Pencil::standard(m)?,
    };
    Ok(ProblemBundle { name: name.into(), pencil, p_recipe: PRecipe::Identity, trial: None, facts: Default::default() })
}

impl ProblemSource {
    pub fn uses_randomness(&self) -> bool {
        match self {
            Self::Generator { spec } => spec.parse::<GenSpec>().is_ok_and(|g| g.is_random()),
            _ => false,
        }
    }

    pub fn load(&self) -> Result<LoadedProblem> {
        match self {
            Self::Generator { spec } => Ok(LoadedProblem { bundle: spec.parse::<GenSpec>()?.build()?, files: Vec::new() }),
            Self::Files { m, n } => {
                let mut files = vec![(m.clone(), fixtures::sha256_file(m)?)];
                let mm = mm::read_matrix_market(m, DEFAULT_DENSE_CAP)?;
                let nm = match n {
                    Some(p) => {
                        files.push((p.clone(), fixtures::sha256_file(p)?));
                        Some(mm::read_matrix_market(p, DEFAULT_DENSE_CAP)?)
                    }
                    None => None,
                };
                Ok(LoadedProblem { bundle: file_bundle("file", mm, nm)?, files })
            }
            Self::Fixture { m, n } => {
                let fm = fixtures::locate(m)?;
                let fnn = fixtures::locate(n)?;
                let mut mats = Vec::new();
                for f in [&fm, &fnn] {
                    let a = mm::read_matrix_market(&f.path, DEFAULT_DENSE_CAP)?;
                    if a.rows() != f.spec.rows || a.cols() != f.spec.cols {
                        return Err(CliError::Usage(format!(
                            "{}: expected {}x{}, read {}x{}",
                            f.spec.name,
                            f.spec.rows,
                            f.spec.cols,
                            a.rows(),
                            a.cols()
                        )));
                    }
                    mats.push(a);
                }
                let nm = mats.pop();
                let mm = mats.pop().expect("two matrices read");
                let bundle = file_bundle(&format!("{m}/{n}"), mm, nm)?;
                Ok(LoadedProblem { bundle, files: vec![(fm.path, fm.sha256), (fnn.path, fnn.sha256)] })
            }
        }
    }
}

/// Choice of inner product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PChoice {
    /// The recipe recommended by the generator (identity for files).
    Default,
    Identity,
    InvM,
    InvN,
    File(PathBuf),
}

impl FromStr for PChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Self::Default),
            "identity" => Ok(Self::Identity),
            "inv-m" => Ok(Self::InvM),
            "inv-n" => Ok(Self::InvN),
            _ => match s.strip_prefix("file=") {
                Some(p) => Ok(Self::File(p.into())),
                None => Err(CliError::Usage(format!("--p expects identity|inv-m|inv-n|file=PATH, got {s:?}"))),
            },
        }
    }
}

impl PChoice {
    pub fn build(&self, bundle: &ProblemBundle) -> Result<InnerProduct> {
        let recipe = match self {
            Self::Default => bundle.p_recipe.clone(),
            Self::Identity => PRecipe::Identity,
            Self::InvM => PRecipe::InverseM,
            Self::InvN => PRecipe::InverseN,
            Self::File(p) => PRecipe::Explicit(mm::read_matrix_market(p, DEFAULT_DENSE_CAP)?),
        };
        Ok(recipe.build(&bundle.pencil)?)
    }
}
