//! Run manifests.
//!
//! Every command writes `manifest.txt` into its output directory before
//! doing any work:
//!
//! ```text
//! fairmax-run v1
//! command = train
//! algorithm = adversarial
//! config_path = cfg.txt
//! dataset = data/
//! dataset_sha256 = 3b1f…
//! seed = 7
//! output_dir = runs/a
//! version = 0.1.0
//! [config]
//! model = logistic
//! …
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use fairmax_core::TrainConfig;

use crate::error::{CliError, Result};

pub const MANIFEST_HEADER: &str = "fairmax-run v1";
pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// Extra `key = value` pairs specific to the command.
    pub details: Vec<(String, String)>,
    pub config_path: Option<PathBuf>,
    pub dataset: Option<String>,
    pub dataset_sha256: Option<String>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub version: String,
    pub config: Option<TrainConfig>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, output_dir: &Path) -> Self {
        Self {
            command: command.to_string(),
            details: Vec::new(),
            config_path: None,
            dataset: None,
            dataset_sha256: None,
            seed,
            output_dir: output_dir.to_path_buf(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: None,
        }
    }

    pub fn to_text(&self) -> String {
        let none = || "-".to_string();
        let mut out = format!("{MANIFEST_HEADER}\ncommand = {}\n", self.command);
        for (k, v) in &self.details {
            out.push_str(&format!("{k} = {v}\n"));
        }
        let config_path = self.config_path.as_ref().map(|p| p.display().to_string());
        out.push_str(&format!("config_path = {}\n", config_path.unwrap_or_else(none)));
        out.push_str(&format!("dataset = {}\n", self.dataset.clone().unwrap_or_else(none)));
        out.push_str(&format!(
            "dataset_sha256 = {}\n",
            self.dataset_sha256.clone().unwrap_or_else(none)
        ));
        out.push_str(&format!("seed = {}\n", self.seed));
        out.push_str(&format!("output_dir = {}\n", self.output_dir.display()));
        out.push_str(&format!("version = {}\n", self.version));
        if let Some(cfg) = &self.config {
            out.push_str("[config]\n");
            out.push_str(&cfg.to_text());
        }
        out
    }

    /// Creates the output directory and writes the manifest into it.
    pub fn write(&self) -> Result<()> {
        fs::create_dir_all(&self.output_dir).map_err(|e| CliError::output(&self.output_dir, e))?;
        let path = self.output_dir.join(MANIFEST_FILE);
        fs::write(&path, self.to_text()).map_err(|e| CliError::output(&path, e))
    }
}

/// The `[config]` section of a manifest as a config text.
pub fn manifest_config(text: &str) -> Option<&str> {
    text.split_once("[config]\n").map(|(_, cfg)| cfg)
}

/// Looks up a top-level `key = value` entry.
pub fn manifest_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .take_while(|l| *l != "[config]")
        .filter_map(|l| l.split_once(" = "))
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v)
}
