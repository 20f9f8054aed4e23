mod common;

use common::*;
use fairmax_core::data::synth_biased;
use fairmax_core::metrics::{statistical_rate, threshold_scores, DECISION_THRESHOLD};
use fairmax_core::model::predict_scores;
use fairmax_core::train::{pretrain_classifier, TrainConfig};

/// Statistical rate of a classifier fitted to the whole synthetic set.
fn baseline_rate(bias: f64, seed: u64) -> f64 {
    let ds = synth_biased(DIRECTIONAL_N, bias, DIRECTIONAL_FEATURES, seed).unwrap();
    let cfg = TrainConfig {
        seed,
        ..TrainConfig::default()
    };
    let clf = pretrain_classifier(&ds, &cfg).unwrap();
    let preds = threshold_scores(&predict_scores(&clf, ds.features()).unwrap(), DECISION_THRESHOLD);
    statistical_rate(&preds, ds.sensitive()).unwrap()
}

fn median_rate(bias: f64) -> f64 {
    median(DIRECTIONAL_SEEDS.iter().map(|&s| baseline_rate(bias, s)).collect())
}

#[test]
fn unbiased_data_gives_fair_baseline() {
    let r = median_rate(0.0);
    assert!(r >= 90.0, "{r}");
}

#[test]
fn strongly_biased_data_fails_eighty_percent_rule() {
    let r = median_rate(0.8);
    assert!(r < 80.0, "{r}");
}

#[test]
fn rate_falls_with_bias() {
    let rates: Vec<f64> = (0..=10).map(|k| median_rate(k as f64 / 10.0)).collect();
    let inversions = rates.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(inversions <= 1, "{rates:?}");
}
