use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::CliResult;
use crate::output::{read_json, write_json};
use crate::Command;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// The complete parameter set, enough to rerun the command.
    pub params: Command,
    pub seed: Option<u64>,
    pub version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub wall_seconds: f64,
    pub outputs: Vec<PathBuf>,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

impl RunManifest {
    pub fn new(params: Command, started_unix: f64, outputs: Vec<PathBuf>) -> Self {
        let finished_unix = unix_now();
        RunManifest {
            command: params.name().into(),
            seed: params.seed(),
            params,
            version: env!("CARGO_PKG_VERSION").into(),
            started_unix,
            finished_unix,
            wall_seconds: finished_unix - started_unix,
            outputs,
        }
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        write_json(path, self)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        read_json(path)
    }
}
