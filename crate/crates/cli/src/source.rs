use std::path::PathBuf;

use clap::Args;
use fairmax_core::data::{load_csv, load_dataset_dir, one_hot_encode};
use fairmax_core::Dataset;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Where a command reads its dataset from: a dataset directory written by
/// `fairmax synth`, or a raw CSV with named column roles.
#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset directory (features.csv, labels.csv, sensitive.csv, meta.txt).
    #[arg(long, conflicts_with = "csv")]
    pub data: Option<PathBuf>,

    /// Raw CSV with a header row; categorical columns are one-hot encoded.
    #[arg(long)]
    pub csv: Option<PathBuf>,

    /// Label column of the CSV.
    #[arg(long, requires = "csv")]
    pub label_col: Option<String>,

    /// Sensitive-attribute column of the CSV.
    #[arg(long, requires = "csv")]
    pub sensitive_col: Option<String>,

    /// Label value mapped to 1.
    #[arg(long, default_value = "1")]
    pub positive: String,

    /// Sensitive value mapped to z = 1.
    #[arg(long, default_value = "1")]
    pub protected: String,
}

pub struct LoadedData {
    pub dataset: Dataset,
    pub origin: String,
    pub sha256: String,
}

impl DataArgs {
    pub fn load(&self) -> Result<LoadedData> {
        let (dataset, origin) = match (&self.data, &self.csv) {
            (Some(dir), None) => (load_dataset_dir(dir)?.0, dir.display().to_string()),
            (None, Some(path)) => {
                let label = self
                    .label_col
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("--csv needs --label-col".into()))?;
                let sensitive = self
                    .sensitive_col
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("--csv needs --sensitive-col".into()))?;
                let table = load_csv(path, label, sensitive, &self.positive, &self.protected)?;
                (one_hot_encode(&table)?, path.display().to_string())
            }
            _ => return Err(CliError::Usage("give exactly one of --data or --csv".into())),
        };
        let sha256 = fingerprint(&dataset);
        Ok(LoadedData {
            dataset,
            origin,
            sha256,
        })
    }
}

/// SHA-256 over the encoded dataset: feature names, shape, feature bits,
/// labels and sensitive values. Two sources that encode to the same
/// dataset share a fingerprint.
pub fn fingerprint(ds: &Dataset) -> String {
    let mut h = Sha256::new();
    h.update(b"fairmax-dataset-fingerprint v1\n");
    for name in ds.feature_names() {
        h.update(name.as_bytes());
        h.update(b"\n");
    }
    h.update((ds.n_samples() as u64).to_le_bytes());
    h.update((ds.n_features() as u64).to_le_bytes());
    for v in ds.features() {
        h.update(v.to_bits().to_le_bytes());
    }
    h.update(ds.labels());
    h.update(ds.sensitive());
    hex::encode(h.finalize())
}
