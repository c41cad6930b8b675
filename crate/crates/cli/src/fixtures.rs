//! Externally fetched matrices, located by name and checked against the
//! manifest shipped in `fixtures/manifest.json`.

use std::fs::File;
use std::io;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Directory searched before the crate's own `fixtures/`.
pub const FIXTURE_DIR_VAR: &str = "QUOTIENT_FIXTURES";

const MANIFEST: &str = include_str!("../fixtures/manifest.json");

#[derive(Debug, Clone, Deserialize)]
pub struct FixtureSpec {
    pub name: String,
    pub file: String,
    pub rows: usize,
    pub cols: usize,
    /// Pinned digest; `None` until a copy has been fetched and recorded.
    pub sha256: Option<String>,
    pub source: String,
}

#[derive(Debug, Deserialize)]
struct Manifest {
    fixtures: Vec<FixtureSpec>,
}

#[derive(Debug, Clone)]
pub struct LocatedFixture {
    pub spec: FixtureSpec,
    pub path: PathBuf,
    pub sha256: String,
}

pub fn manifest() -> Result<Vec<FixtureSpec>> {
    Ok(serde_json::from_str::<Manifest>(MANIFEST)?.fixtures)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    io::copy(&mut file, &mut hasher).map_err(|e| CliError::io(path, e))?;
    Ok(format!("{:x}", hasher.finalize()))
}

fn search_dirs() -> Vec<PathBuf> {
    let mut dirs = Vec::new();
    if let Some(d) = std::env::var_os(FIXTURE_DIR_VAR) {
        dirs.push(PathBuf::from(d));
    }
    dirs.push(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    dirs
}

/// Finds the named fixture and verifies its digest when one is pinned.
pub fn locate(name: &str) -> Result<LocatedFixture> {
    let spec = manifest()?.into_iter().find(|f| f.name == name).ok_or_else(|| CliError::Usage(format!("unknown fixture {name}")))?;
    let path = search_dirs()
        .into_iter()
        .map(|d| d.join(&spec.file))
        .find(|p| p.is_file())
        .ok_or_else(|| CliError::MissingFixture(spec.file.clone()))?;
    let sha256 = sha256_file(&path)?;
    if let Some(expected) = &spec.sha256 {
        if !expected.eq_ignore_ascii_case(&sha256) {
            return Err(CliError::Checksum { path, expected: expected.clone(), found: sha256 });
        }
    }
    Ok(LocatedFixture { spec, path, sha256 })
}
