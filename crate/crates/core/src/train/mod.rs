//! Training procedures.
//!
//! Every trainer is a pure function of `(split, config)`: all randomness
//! comes from ChaCha streams derived from `config.seed`, one stream per
//! purpose, so that e.g. toggling noise does not change which mini-batches
//! are drawn.

mod adversarial;
mod config;
mod gda;
mod noise;
mod persist;
mod pretrain;
mod select;

pub use adversarial::{adversarial_train, plain_minibatch};
pub use config::{AdversaryUpdate, Alpha, TrainConfig, CONFIG_KEYS, DEFAULT_ALPHA};
pub use gda::{gda_modified, gda_normal, modified_direction, normal_direction, project, PROJECTION_GUARD};
pub use noise::{inject_noise, NoiseSource};
pub use persist::{read_trace_csv, save_result, trace_to_csv, write_trace_csv, TRACE_HEADER};
pub use pretrain::{pretrain_adversary, pretrain_classifier};
pub use select::select_model;

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Split;
use crate::error::{Error, Result};
use crate::losses::{bce, fairness_loss, FairRegConfig};
use crate::metrics::{report_from_scores, FairnessReport};
use crate::model::{predict_scores, AdversaryParams, ModelParams};

/// Independent random streams derived from one seed.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Stream {
    Init = 0,
    ClassifierBatches = 1,
    AdversaryShuffle = 2,
    Noise = 3,
}

pub(crate) fn rng_for(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Draws `size` distinct row indices (all rows when `size ≥ n`).
pub(crate) fn sample_batch(rng: &mut ChaCha8Rng, n: usize, size: usize) -> Vec<usize> {
    index::sample(rng, n, size.min(n)).into_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Pre-training only.
    Baseline,
    Adversarial,
    GdaNormal,
    GdaModified,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Baseline,
        Algorithm::Adversarial,
        Algorithm::GdaNormal,
        Algorithm::GdaModified,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Baseline => "baseline",
            Algorithm::Adversarial => "adversarial",
            Algorithm::GdaNormal => "gda-normal",
            Algorithm::GdaModified => "gda-modified",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

/// Metrics after one training iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub statistical_rate_train: f64,
    pub statistical_rate_test: f64,
    /// Adversary ROC AUC for the sensitive attribute on the test part.
    pub adversary_auc: f64,
    /// `L_C` on the training part.
    pub loss_c: f64,
    /// `L_F` on the training part.
    pub loss_f: f64,
    pub snapshot_id: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub algorithm: Algorithm,
    pub final_params: ModelParams,
    pub final_adv: AdversaryParams,
    pub selected_params: ModelParams,
    pub selected_adv: AdversaryParams,
    pub selected_epoch: usize,
    pub trace: Vec<EpochRecord>,
    /// Parameters after every recorded epoch, indexed by `snapshot_id − 1`.
    pub snapshots: Vec<(ModelParams, AdversaryParams)>,
    pub config: TrainConfig,
    pub seed: u64,
}

impl TrainResult {
    pub(crate) fn from_trace(
        algorithm: Algorithm,
        config: &TrainConfig,
        trace: Vec<EpochRecord>,
        snapshots: Vec<(ModelParams, AdversaryParams)>,
    ) -> Result<Self> {
        let selected_epoch = select_model(&trace, config.fairness_floor)?;
        let (selected_params, selected_adv) = snapshots[selected_epoch - 1].clone();
        let (final_params, final_adv) = snapshots.last().cloned().ok_or(Error::EmptyTrace)?;
        Ok(Self {
            algorithm,
            final_params,
            final_adv,
            selected_params,
            selected_adv,
            selected_epoch,
            trace,
            snapshots,
            config: config.clone(),
            seed: config.seed,
        })
    }

    pub fn selected_record(&self) -> &EpochRecord {
        &self.trace[self.selected_epoch - 1]
    }
}

/// Train/test reports for a pair of parameters.
pub fn reports(clf: &ModelParams, adv: &AdversaryParams, split: &Split) -> Result<(FairnessReport, FairnessReport)> {
    let train = report_from_scores(&predict_scores(clf, split.train.features())?, adv, &split.train)?;
    let test = report_from_scores(&predict_scores(clf, split.test.features())?, adv, &split.test)?;
    Ok((train, test))
}

pub(crate) fn record_epoch(
    epoch: usize,
    clf: &ModelParams,
    adv: &AdversaryParams,
    split: &Split,
    reg: &FairRegConfig,
) -> Result<EpochRecord> {
    let train_scores = predict_scores(clf, split.train.features())?;
    let loss_c = bce(&train_scores, split.train.labels())?.value;
    let loss_f = fairness_loss(&train_scores, split.train.sensitive(), reg, adv)?.value;
    if !loss_c.is_finite() || !loss_f.is_finite() {
        return Err(Error::Divergence {
            iteration: epoch,
            what: "loss".into(),
        });
    }
    let train = report_from_scores(&train_scores, adv, &split.train)?;
    let test = report_from_scores(&predict_scores(clf, split.test.features())?, adv, &split.test)?;
    Ok(EpochRecord {
        epoch,
        train_accuracy: train.accuracy,
        test_accuracy: test.accuracy,
        statistical_rate_train: train.statistical_rate,
        statistical_rate_test: test.statistical_rate,
        adversary_auc: test.adversary_auc,
        loss_c,
        loss_f,
        snapshot_id: epoch,
    })
}

pub(crate) fn ensure_finite(iteration: usize, clf: &ModelParams, adv: &AdversaryParams) -> Result<()> {
    if !clf.is_finite() {
        return Err(Error::Divergence {
            iteration,
            what: "classifier parameters".into(),
        });
    }
    if !adv.is_finite() {
        return Err(Error::Divergence {
            iteration,
            what: "adversary parameters".into(),
        });
    }
    Ok(())
}

/// Pre-trains both players and records a single epoch.
pub fn baseline(split: &Split, config: &TrainConfig) -> Result<TrainResult> {
    config.validate()?;
    let clf = pretrain_classifier(&split.train, config)?;
    let adv = pretrain_adversary(&clf, &split.train, config)?;
    let reg = FairRegConfig::new(config.reg_weight)?;
    let record = record_epoch(1, &clf, &adv, split, &reg)?;
    TrainResult::from_trace(Algorithm::Baseline, config, vec![record], vec![(clf, adv)])
}

/// Runs one algorithm end to end.
pub fn train(algorithm: Algorithm, split: &Split, config: &TrainConfig) -> Result<TrainResult> {
    match algorithm {
        Algorithm::Baseline => baseline(split, config),
        Algorithm::Adversarial => adversarial_train(split, config),
        Algorithm::GdaNormal => gda_normal(split, config),
        Algorithm::GdaModified => gda_modified(split, config),
    }
}
