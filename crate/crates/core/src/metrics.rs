//! Fairness and performance metrics.
//!
//! The statistical rate of a binary predictor is
//! `100 · min(r₁/r₀, r₀/r₁)` with `rᵢ = P(ŷ=1 | z=i)`. A predictor passes
//! the 80% rule when its statistical rate is at least 80.
//!
//! Conventions where the ratio is undefined: if neither group receives a
//! positive prediction the rate is 100 (no disparate impact); if exactly
//! one group does, the rate is 0.

use std::fmt;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{adversary_scores, predict_scores, AdversaryParams, ModelParams};

/// Threshold applied to scores for every reported metric.
pub const DECISION_THRESHOLD: f64 = 0.5;

/// Statistical rate at or above which a predictor passes the 80% rule.
pub const EIGHTY_PERCENT_RULE: f64 = 80.0;

fn check_binary_pair(a: &[u8], b: &[u8]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::EmptyTable);
    }
    if a.len() != b.len() {
        return Err(Error::dims(a.len(), b.len()));
    }
    if a.iter().chain(b).any(|&v| v > 1) {
        return Err(Error::InvalidArgument("expected binary vectors".into()));
    }
    Ok(())
}

/// Positive-prediction rates `(P(ŷ=1|z=1), P(ŷ=1|z=0))`.
pub fn group_positive_rates(predictions: &[u8], sensitive: &[u8]) -> Result<(f64, f64)> {
    check_binary_pair(predictions, sensitive)?;
    let mut pos = [0usize; 2];
    let mut tot = [0usize; 2];
    for (&p, &z) in predictions.iter().zip(sensitive) {
        tot[z as usize] += 1;
        pos[z as usize] += p as usize;
    }
    for g in [0u8, 1] {
        if tot[g as usize] == 0 {
            return Err(Error::EmptyGroup(g));
        }
    }
    Ok((
        pos[1] as f64 / tot[1] as f64,
        pos[0] as f64 / tot[0] as f64,
    ))
}

fn rate_from_group_rates(r1: f64, r0: f64) -> f64 {
    match (r1 > 0.0, r0 > 0.0) {
        (false, false) => 100.0,
        (true, true) => 100.0 * (r1 / r0).min(r0 / r1),
        _ => 0.0,
    }
}

/// The p% value of a binary predictor, in `[0, 100]`.
pub fn statistical_rate(predictions: &[u8], sensitive: &[u8]) -> Result<f64> {
    let (r1, r0) = group_positive_rates(predictions, sensitive)?;
    Ok(rate_from_group_rates(r1, r0))
}

/// Fraction of matching entries.
pub fn accuracy(predictions: &[u8], labels: &[u8]) -> Result<f64> {
    check_binary_pair(predictions, labels)?;
    let hits = predictions.iter().zip(labels).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / predictions.len() as f64)
}

/// `1` where `score > threshold`, else `0`.
pub fn threshold_scores(scores: &[f64], threshold: f64) -> Vec<u8> {
    scores.iter().map(|&s| (s > threshold) as u8).collect()
}

/// Area under the ROC curve via the Mann–Whitney rank statistic; tied
/// scores count one half.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::dims(scores.len(), labels.len()));
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidArgument("roc_auc needs both classes".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // sum of (1-based, tie-averaged) ranks of the positives, kept doubled
    // so ties stay integral
    let mut doubled_rank_sum: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let doubled_avg = (i + 1 + j + 1) as u128;
        let positives = order[i..=j].iter().filter(|&&k| labels[k] == 1).count() as u128;
        doubled_rank_sum += doubled_avg * positives;
        i = j + 1;
    }
    let n_pos = n_pos as u128;
    let doubled_u = doubled_rank_sum - n_pos * (n_pos + 1);
    Ok(doubled_u as f64 / (2 * n_pos * n_neg as u128) as f64)
}

/// Summary of a classifier and adversary on one dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairnessReport {
    pub statistical_rate: f64,
    /// `(P(ŷ=1|z=1), P(ŷ=1|z=0))`.
    pub group_positive_rates: (f64, f64),
    pub passes_80_rule: bool,
    pub accuracy: f64,
    pub adversary_auc: f64,
    pub n_samples: usize,
}

impl FairnessReport {
    /// Flat `key = value` lines.
    pub fn to_kv(&self) -> String {
        self.to_string()
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let get = |key: &str| -> Result<String> {
            text.lines()
                .filter_map(|l| l.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .map(|(_, v)| v.trim().to_string())
                .ok_or_else(|| Error::InvalidArgument(format!("report is missing `{key}`")))
        };
        let num = |v: String| -> Result<f64> {
            v.parse().map_err(|_| Error::InvalidArgument(format!("bad number `{v}`")))
        };
        Ok(Self {
            statistical_rate: num(get("statistical_rate")?)?,
            group_positive_rates: (
                num(get("positive_rate_z1")?)?,
                num(get("positive_rate_z0")?)?,
            ),
            passes_80_rule: get("passes_80_rule")? == "true",
            accuracy: num(get("accuracy")?)?,
            adversary_auc: num(get("adversary_auc")?)?,
            n_samples: get("n_samples")?
                .parse()
                .map_err(|_| Error::InvalidArgument("bad n_samples".into()))?,
        })
    }
}

impl fmt::Display for FairnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "statistical_rate = {}", self.statistical_rate)?;
        writeln!(f, "positive_rate_z1 = {}", self.group_positive_rates.0)?;
        writeln!(f, "positive_rate_z0 = {}", self.group_positive_rates.1)?;
        writeln!(f, "passes_80_rule = {}", self.passes_80_rule)?;
        writeln!(f, "accuracy = {}", self.accuracy)?;
        writeln!(f, "adversary_auc = {}", self.adversary_auc)?;
        writeln!(f, "n_samples = {}", self.n_samples)
    }
}

/// Scores → threshold at 0.5 → statistical rate and accuracy; the
/// adversary AUC is measured against the sensitive attribute.
pub fn evaluate(clf: &ModelParams, adv: &AdversaryParams, dataset: &Dataset) -> Result<FairnessReport> {
    let scores = predict_scores(clf, dataset.features())?;
    report_from_scores(&scores, adv, dataset)
}

pub(crate) fn report_from_scores(
    scores: &[f64],
    adv: &AdversaryParams,
    dataset: &Dataset,
) -> Result<FairnessReport> {
    let predictions = threshold_scores(scores, DECISION_THRESHOLD);
    let (r1, r0) = group_positive_rates(&predictions, dataset.sensitive())?;
    let rate = rate_from_group_rates(r1, r0);
    Ok(FairnessReport {
        statistical_rate: rate,
        group_positive_rates: (r1, r0),
        passes_80_rule: rate >= EIGHTY_PERCENT_RULE,
        accuracy: accuracy(&predictions, dataset.labels())?,
        adversary_auc: roc_auc(&adversary_scores(adv, scores), dataset.sensitive())?,
        n_samples: dataset.n_samples(),
    })
}
