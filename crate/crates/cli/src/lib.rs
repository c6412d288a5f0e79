//! Command-line front end for `chsh-meter`: state files, analysis documents,
//! sweeps, verification runs and shot simulations.

pub mod document;
pub mod error;
pub mod input;
pub mod render;
pub mod simulate;
pub mod sweep;
pub mod verify;

pub use document::{analyze, AnalysisDocument, AnalyzeOptions};
pub use error::{CliError, Result};
pub use input::StateFile;

/// Environment variable capping internal parallelism.
pub const THREADS_ENV: &str = "CHSH_METER_THREADS";
