use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use lexikernel::Result;

#[derive(Debug, Serialize)]
pub struct InputFile {
    pub path: String,
    pub bytes: Option<u64>,
}

impl InputFile {
    pub fn new(path: &Path) -> Self {
        InputFile {
            path: path.display().to_string(),
            bytes: fs::metadata(path).ok().map(|m| m.len()),
        }
    }
}

/// Provenance written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Vec<InputFile>,
    pub stoplist: Option<String>,
    pub norms: Option<String>,
    pub options: serde_json::Value,
    pub wall_time_secs: f64,
}

impl RunManifest {
    pub fn new(command: &str, inputs: &[&Path], options: serde_json::Value) -> Self {
        RunManifest {
            tool: "lexikernel",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            inputs: inputs.iter().map(|p| InputFile::new(p)).collect(),
            stoplist: None,
            norms: None,
            options,
            wall_time_secs: 0.0,
        }
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    /// Writes `<output>.manifest.json`.
    pub fn write_beside(&self, output: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(Self::path_for(output), text + "\n")?;
        Ok(())
    }
}
