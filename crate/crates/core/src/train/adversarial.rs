use log::warn;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::{
    ensure_finite, pretrain_adversary, pretrain_classifier, record_epoch, rng_for, sample_batch, Algorithm,
    NoiseSource, Stream, TrainConfig, TrainResult,
};
use crate::data::{Dataset, Split};
use crate::error::Result;
use crate::losses::{adversary_score_grad, bce_score_grad, grad_lf_wrt_adv, FairRegConfig, LOG_EPS};
use crate::model::{grad_params, predict_scores, AdversaryParams, GradientVector, ModelParams};

/// One pass of mini-batch descent on the adversary cross-entropy over the
/// whole training set, classifier frozen.
fn adversary_epoch(
    clf: &ModelParams,
    train: &Dataset,
    mut adv: AdversaryParams,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<AdversaryParams> {
    let scores = predict_scores(clf, train.features())?;
    let mut order: Vec<usize> = (0..train.n_samples()).collect();
    order.shuffle(rng);
    let mut s = Vec::with_capacity(config.batch_size);
    let mut z = Vec::with_capacity(config.batch_size);
    for chunk in order.chunks(config.batch_size) {
        s.clear();
        z.clear();
        s.extend(chunk.iter().map(|&i| scores[i]));
        z.extend(chunk.iter().map(|&i| train.sensitive()[i]));
        let grad = grad_lf_wrt_adv(&s, &z, &adv)?;
        adv = adv.moved(&grad, -config.eta1)?;
    }
    Ok(adv)
}

/// Gradient of `L_C − λ·adversary_loss` on a batch with the adversary fixed.
fn classifier_gradient(
    clf: &ModelParams,
    batch: &Dataset,
    adv: &AdversaryParams,
    lambda: f64,
) -> Result<GradientVector> {
    let scores = predict_scores(clf, batch.features())?;
    let mut dscore = bce_score_grad(&scores, batch.labels())?;
    let dadv = adversary_score_grad(&scores, batch.sensitive(), adv, LOG_EPS)?;
    for (d, a) in dscore.iter_mut().zip(&dadv) {
        *d -= lambda * a;
    }
    grad_params(clf, batch.features(), &dscore)
}

/// Draws the classifier's mini-batch. When the adversary term is active a
/// batch missing a sensitive group is redrawn once, and the iteration is
/// skipped if the redraw is also single-group.
fn draw_batch(train: &Dataset, config: &TrainConfig, rng: &mut ChaCha8Rng, t: usize) -> Option<Dataset> {
    let batch = train.select(&sample_batch(rng, train.n_samples(), config.batch_size));
    if config.lambda == 0.0 || batch.has_both_groups() {
        return Some(batch);
    }
    let batch = train.select(&sample_batch(rng, train.n_samples(), config.batch_size));
    if batch.has_both_groups() {
        Some(batch)
    } else {
        warn!("iteration {t}: mini-batch holds a single sensitive group twice in a row; skipping");
        None
    }
}

/// Alternating adversarial training.
///
/// After pre-training the classifier and then the adversary on the full
/// training set, each of the `epochs` iterations trains the adversary for
/// one mini-batch epoch over the full training set with the classifier
/// fixed, then takes one classifier step on a single sampled mini-batch
/// along `−∇(L_C − λ·adversary_loss)` with the adversary fixed.
pub fn adversarial_train(split: &Split, config: &TrainConfig) -> Result<TrainResult> {
    config.validate()?;
    let train = &split.train;
    let mut clf = pretrain_classifier(train, config)?;
    let mut adv = pretrain_adversary(&clf, train, config)?;
    let reg = FairRegConfig::new(config.reg_weight)?;

    let mut batches = rng_for(config.seed, Stream::ClassifierBatches);
    let mut shuffle = rng_for(config.seed, Stream::AdversaryShuffle);
    let mut noise = NoiseSource::new(config.noise_enabled, config.seed);

    let mut trace = Vec::with_capacity(config.epochs);
    let mut snapshots = Vec::with_capacity(config.epochs);
    for t in 1..=config.epochs {
        adv = adversary_epoch(&clf, train, adv, config, &mut shuffle)?;
        let factor = noise.next_factor();
        if let Some(batch) = draw_batch(train, config, &mut batches, t) {
            let batch = if config.noise_enabled { batch.scaled_features(factor) } else { batch };
            let grad = classifier_gradient(&clf, &batch, &adv, config.lambda)?;
            clf.descend(&grad, config.eta2)?;
        }
        ensure_finite(t, &clf, &adv)?;
        trace.push(record_epoch(t, &clf, &adv, split, &reg)?);
        snapshots.push((clf.clone(), adv));
    }
    TrainResult::from_trace(Algorithm::Adversarial, config, trace, snapshots)
}

/// Plain mini-batch descent on `L_C` from `init`, drawing batches and noise
/// from the same streams as [`adversarial_train`]. Returns the parameters
/// after every iteration.
pub fn plain_minibatch(train: &Dataset, init: ModelParams, config: &TrainConfig) -> Result<Vec<ModelParams>> {
    let mut batches = rng_for(config.seed, Stream::ClassifierBatches);
    let mut noise = NoiseSource::new(config.noise_enabled, config.seed);
    let mut clf = init;
    let mut out = Vec::with_capacity(config.epochs);
    for t in 1..=config.epochs {
        let factor = noise.next_factor();
        let batch = train.select(&sample_batch(&mut batches, train.n_samples(), config.batch_size));
        let batch = if config.noise_enabled { batch.scaled_features(factor) } else { batch };
        let scores = predict_scores(&clf, batch.features())?;
        let dscore = bce_score_grad(&scores, batch.labels())?;
        clf.descend(&grad_params(&clf, batch.features(), &dscore)?, config.eta2)?;
        ensure_finite(t, &clf, &AdversaryParams::default())?;
        out.push(clf.clone());
    }
    Ok(out)
}
