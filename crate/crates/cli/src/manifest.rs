use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Everything needed to reproduce an emitted artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_path: Option<String>,
    /// sha256 of the configuration as parsed and re-serialized
    pub config_hash: String,
    pub output_dir: Option<String>,
    pub grid: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub tool_version: String,
}

impl RunManifest {
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("manifest serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Trailing `#` comment block for CSV outputs.
    pub fn comment_block(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# subcommand: {}\n", self.subcommand));
        out.push_str(&format!(
            "# config: {}\n",
            self.config_path.as_deref().unwrap_or("<built-in preset>")
        ));
        out.push_str(&format!("# config_sha256: {}\n", self.config_hash));
        for (k, v) in &self.grid {
            out.push_str(&format!("# grid.{k}: {v}\n"));
        }
        for (k, v) in &self.tolerances {
            out.push_str(&format!("# tol.{k}: {v:e}\n"));
        }
        out.push_str(&format!("# seed: {}\n", self.seed));
        out.push_str(&format!("# tool_version: {}\n", self.tool_version));
        out.push_str(&format!("# manifest_sha256: {}\n", self.hash()));
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `body` to `<dir>/<name>` when an output directory is given,
/// otherwise to stdout.
pub fn emit(dir: Option<&Path>, name: &str, body: &str) -> std::io::Result<Option<PathBuf>> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, body)?;
            Ok(Some(path))
        }
        None => {
            print!("{body}");
            Ok(None)
        }
    }
}

#[derive(Serialize)]
pub struct WithManifest<'a, T: Serialize> {
    #[serde(flatten)]
    pub report: &'a T,
    pub manifest: &'a RunManifest,
    pub manifest_sha256: String,
}

pub fn json_with_manifest<T: Serialize>(report: &T, manifest: &RunManifest) -> String {
    let wrapped = WithManifest {
        report,
        manifest,
        manifest_sha256: manifest.hash(),
    };
    let mut text = serde_json::to_string_pretty(&wrapped).expect("report serializes");
    text.push('\n');
    text
}
