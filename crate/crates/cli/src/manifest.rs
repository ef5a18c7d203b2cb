use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cli::Command;
use crate::Failure;

pub const FILE_NAME: &str = "manifest.json";

/// Written next to every run's outputs; `rerun` replays `run` verbatim.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub run: Command,
    pub rng_seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    /// File names inside the output directory.
    pub outputs: Vec<String>,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<(), Failure> {
        let file = std::fs::File::create(dir.join(FILE_NAME))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self).map_err(Failure::from_json)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
    }
}
