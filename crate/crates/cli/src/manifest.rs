use std::ffi::OsString;
use std::path::{Path, PathBuf};

use lowner_core::ProbeConfig;
use serde::{Deserialize, Serialize};

/// Record of one invocation, sufficient to re-run it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, without output flags.
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ProbeConfig>,
    pub version: String,
    pub started_unix_ms: u64,
    pub wall_clock_ms: u64,
    pub outputs: Vec<PathBuf>,
    pub exit_code: i32,
}

/// Drops `--out`/`--manifest` and their values.
pub fn replayable_args(args: impl IntoIterator<Item = OsString>) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.into_iter().map(|a| a.to_string_lossy().into_owned()) {
        if skip {
            skip = false;
            continue;
        }
        match a.as_str() {
            "--out" | "--manifest" => skip = true,
            s if s.starts_with("--out=") || s.starts_with("--manifest=") => {}
            _ => out.push(a),
        }
    }
    out
}

pub fn default_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn read(path: &Path) -> anyhow::Result<RunManifest> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
