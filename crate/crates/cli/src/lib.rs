//! Command-line front end for `quotient-core`: Matrix Market ingestion,
//! fixture handling, run specifications with JSON logs, and self-tests.

pub mod error;
pub mod fixtures;
pub mod mm;
pub mod pipeline;
pub mod problem;
pub mod selftest;

pub use error::{CliError, Result};
