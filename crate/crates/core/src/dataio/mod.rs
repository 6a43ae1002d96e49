//! Matrix files, frame stacks and JSON reports.

mod frames;
mod matrix;

pub use frames::{load_frame_stack, read_pgm, write_frame, write_pgm, FrameStack, GrayFrame};
pub use matrix::{
    decode_ffpm, encode_csv, encode_ffpm, parse_csv, read_matrix, write_matrix, MatrixFormat, FFPM_MAGIC, FFPM_VERSION,
};

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::Metrics;
use crate::error::Result;
use crate::solvers::{LambdaSweep, SolveReport, SolverConfig};

/// Provenance written next to every output artifact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    /// Seconds.
    pub wall_time: f64,
}

/// The JSON report: every [`SolveReport`] field at top level plus the
/// configuration that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub config: SolverConfig,
    #[serde(flatten)]
    pub report: SolveReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_sweep: Option<LambdaSweep>,
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
