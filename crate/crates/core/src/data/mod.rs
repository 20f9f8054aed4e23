//! Tabular datasets with a binary label and a binary sensitive attribute.

mod encode;
mod store;
mod synth;
mod table;

pub use encode::one_hot_encode;
pub use store::{load_dataset_dir, save_dataset_dir, DatasetMeta};
pub use synth::synth_biased;
pub use table::{load_csv, parse_csv, Cell, RawTable};

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Maximum number of permutations tried by [`split`] before giving up.
pub const SPLIT_ATTEMPTS: usize = 100;

/// Encoded features `X`, labels `Y` and sensitive attribute `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<u8>,
    sensitive: Vec<u8>,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Array2<f64>,
        labels: Vec<u8>,
        sensitive: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n = features.nrows();
        if n == 0 {
            return Err(Error::EmptyTable);
        }
        if labels.len() != n {
            return Err(Error::dims(n, labels.len()));
        }
        if sensitive.len() != n {
            return Err(Error::dims(n, sensitive.len()));
        }
        if feature_names.len() != features.ncols() {
            return Err(Error::dims(features.ncols(), feature_names.len()));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("features contain a non-finite value".into()));
        }
        if labels.iter().chain(&sensitive).any(|&v| v > 1) {
            return Err(Error::InvalidArgument("labels and sensitive must be 0 or 1".into()));
        }
        for group in [0u8, 1] {
            if !sensitive.contains(&group) {
                return Err(Error::EmptyGroup(group));
            }
        }
        Ok(Self {
            features,
            labels,
            sensitive,
            feature_names,
        })
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn sensitive(&self) -> &[u8] {
        &self.sensitive
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// Number of rows in each sensitive group, `(z=0, z=1)`.
    pub fn group_sizes(&self) -> (usize, usize) {
        let ones = self.sensitive.iter().filter(|&&z| z == 1).count();
        (self.sensitive.len() - ones, ones)
    }

    /// Rows selected by `indices`, in that order. Unlike [`Dataset::new`]
    /// this does not require both groups to be present, so it can back
    /// mini-batches; use [`Dataset::has_both_groups`] where that matters.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            sensitive: indices.iter().map(|&i| self.sensitive[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    pub fn has_both_groups(&self) -> bool {
        let (g0, g1) = self.group_sizes();
        g0 > 0 && g1 > 0
    }

    /// Same rows with every feature multiplied by `factor`.
    pub fn scaled_features(&self, factor: f64) -> Dataset {
        Dataset {
            features: &self.features * factor,
            ..self.clone()
        }
    }
}

/// A train/test partition of a dataset's rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
}

/// Seeded random partition with `⌈n·test_fraction⌉` test rows.
///
/// The permutation is redrawn (up to [`SPLIT_ATTEMPTS`] times) until both
/// parts contain both sensitive groups.
pub fn split(dataset: &Dataset, test_fraction: f64, seed: u64) -> Result<Split> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let n = dataset.n_samples();
    let n_test = (n as f64 * test_fraction).ceil() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::InvalidArgument(format!(
            "cannot split {n} rows with test fraction {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let both = |idx: &[usize]| {
        let ones = idx.iter().filter(|&&i| dataset.sensitive[i] == 1).count();
        ones > 0 && ones < idx.len()
    };
    for _ in 0..SPLIT_ATTEMPTS {
        order.shuffle(&mut rng);
        let (test_idx, train_idx) = order.split_at(n_test);
        if both(test_idx) && both(train_idx) {
            return Ok(Split {
                train: dataset.select(train_idx),
                test: dataset.select(test_idx),
                train_indices: train_idx.to_vec(),
                test_indices: test_idx.to_vec(),
                seed,
            });
        }
    }
    Err(Error::SplitFailed(SPLIT_ATTEMPTS))
}
