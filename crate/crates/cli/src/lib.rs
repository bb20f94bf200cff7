//! Experiment harness: config parsing, prebuilt experiment suites, replica
//! orchestration, file export and cross-replica summaries.

pub mod config;
pub mod manifest;
pub mod oracle;
pub mod runner;
pub mod suites;
pub mod summarize;

use std::path::Path;

use thiserror::Error;

/// Harness errors, split by exit code: validation problems exit 1, I/O
/// problems exit 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io { .. } => 2,
        }
    }
}

pub use config::parse_config;
pub use manifest::{RunEntry, RunManifest, RunSummary};
pub use runner::execute;
pub use suites::{ExperimentSpec, PlannedRun, SuiteName, SweepPoint};
pub use summarize::summarize;
