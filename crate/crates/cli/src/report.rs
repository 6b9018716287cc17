//! JSON report layout and atomic file output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::run::Outcome;

/// Bumped whenever a field is added, removed or renamed.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize)]
pub struct Report<'a> {
    pub schema_version: &'static str,
    pub conventions: &'static str,
    pub tool_version: &'static str,
    pub command: &'a str,
    pub config: &'a BTreeMap<String, String>,
    pub seed: u64,
    pub pass: bool,
    pub exit_code: u8,
    pub results: &'a [Value],
    /// The only field that differs between identical runs.
    pub wall_time_s: f64,
}

impl<'a> Report<'a> {
    pub fn new(
        command: &'a str,
        config: &'a BTreeMap<String, String>,
        seed: u64,
        outcome: &'a Outcome,
        exit_code: u8,
        wall_time_s: f64,
    ) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            conventions: whodge::CONVENTIONS,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            seed,
            pass: outcome.pass,
            exit_code,
            results: &outcome.results,
            wall_time_s,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Write to a temporary file in the target directory, then rename over the
/// target so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}
