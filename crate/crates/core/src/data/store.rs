//! On-disk dataset directories.
//!
//! ```text
//! <dir>/features.csv   header = feature names, one row per sample
//! <dir>/labels.csv     header `label`, one 0/1 per line
//! <dir>/sensitive.csv  header `sensitive`, one 0/1 per line
//! <dir>/meta.txt       key = value lines (format, n_samples, n_features, seed, provenance)
//! ```
//!
//! Floats are written in shortest round-trip form so a reload is bit-exact.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use super::Dataset;
use crate::error::{Error, Result};

pub const DATASET_FORMAT: &str = "fairmax-dataset v1";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetMeta {
    pub seed: Option<u64>,
    pub provenance: String,
}

pub fn save_dataset_dir(dataset: &Dataset, meta: &DatasetMeta, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let path = dir.join("features.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(dataset.feature_names())?;
    let mut buf = Vec::with_capacity(dataset.n_features());
    for row in dataset.features().rows() {
        buf.clear();
        buf.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&buf)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    write_column(&dir.join("labels.csv"), "label", dataset.labels())?;
    write_column(&dir.join("sensitive.csv"), "sensitive", dataset.sensitive())?;

    let path = dir.join("meta.txt");
    let seed = meta.seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
    let text = format!(
        "format = {DATASET_FORMAT}\nn_samples = {}\nn_features = {}\nseed = {seed}\nprovenance = {}\n",
        dataset.n_samples(),
        dataset.n_features(),
        meta.provenance.replace('\n', " "),
    );
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn write_column(path: &Path, header: &str, values: &[u8]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "{header}").map_err(io)?;
    for v in values {
        writeln!(w, "{v}").map_err(io)?;
    }
    w.flush().map_err(io)
}

fn read_column(path: &Path) -> Result<Vec<u8>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| match l.trim() {
            "0" => Ok(0),
            "1" => Ok(1),
            other => Err(Error::format(path, format!("line {}: expected 0 or 1, got `{other}`", i + 2))),
        })
        .collect()
}

pub fn load_dataset_dir(dir: impl AsRef<Path>) -> Result<(Dataset, DatasetMeta)> {
    let dir = dir.as_ref();
    let path = dir.join("features.csv");
    let mut rdr = csv::Reader::from_path(&path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(&path, io),
        other => Error::format(&path, format!("{other:?}")),
    })?;
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut values = Vec::new();
    let mut n = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != names.len() {
            return Err(Error::RaggedRow {
                line: i + 2,
                expected: names.len(),
                found: rec.len(),
            });
        }
        for field in rec.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::format(&path, format!("line {}: bad number `{field}`", i + 2)))?;
            values.push(v);
        }
        n += 1;
    }
    let features = Array2::from_shape_vec((n, names.len()), values)
        .map_err(|e| Error::format(&path, e.to_string()))?;
    let labels = read_column(&dir.join("labels.csv"))?;
    let sensitive = read_column(&dir.join("sensitive.csv"))?;

    let path = dir.join("meta.txt");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut meta = DatasetMeta::default();
    for line in text.lines() {
        let Some((k, v)) = line.split_once('=') else { continue };
        match k.trim() {
            "format" if v.trim() != DATASET_FORMAT => {
                return Err(Error::format(&path, format!("unsupported format `{}`", v.trim())))
            }
            "seed" => meta.seed = v.trim().parse().ok(),
            "provenance" => meta.provenance = v.trim().to_string(),
            _ => {}
        }
    }
    Ok((Dataset::new(features, labels, sensitive, names)?, meta))
}
