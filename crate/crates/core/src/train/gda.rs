use std::borrow::Cow;

use log::warn;

use super::{
    ensure_finite, pretrain_adversary, pretrain_classifier, record_epoch, rng_for, sample_batch, AdversaryUpdate,
    Algorithm, Alpha, NoiseSource, Stream, TrainConfig, TrainResult, DEFAULT_ALPHA,
};
use crate::data::Split;
use crate::error::Result;
use crate::losses::{bce_score_grad, fairness_score_grad, grad_lf_wrt_adv, FairRegConfig};
use crate::model::{grad_params, predict_scores, GradientVector};

/// Below this squared norm of `f`, [`project`] returns zero.
pub const PROJECTION_GUARD: f64 = 1e-18;

/// Projection of `g` onto the line spanned by `f`: `(⟨g,f⟩/⟨f,f⟩)·f`.
pub fn project(g: &GradientVector, f: &GradientVector) -> Result<GradientVector> {
    let dot = g.dot(f)?;
    let norm_sq = f.norm_sq();
    if norm_sq < PROJECTION_GUARD {
        return Ok(f.scaled(0.0));
    }
    Ok(f.scaled(dot / norm_sq))
}

/// Classifier direction of the normal update: `∇L_C − α·∇L_F`.
pub fn normal_direction(grad_c: &GradientVector, grad_f: &GradientVector, alpha: f64) -> Result<GradientVector> {
    grad_c.add_scaled(grad_f, -alpha)
}

/// Classifier direction of the modified update:
/// `∇L_C − α·∇L_F − Π_{∇L_F} ∇L_C`.
pub fn modified_direction(grad_c: &GradientVector, grad_f: &GradientVector, alpha: f64) -> Result<GradientVector> {
    normal_direction(grad_c, grad_f, alpha)?.sub(&project(grad_c, grad_f)?)
}

fn gda(split: &Split, config: &TrainConfig, modified: bool) -> Result<TrainResult> {
    config.validate()?;
    let train = &split.train;
    let mut clf = pretrain_classifier(train, config)?;
    let mut adv = pretrain_adversary(&clf, train, config)?;
    let reg = FairRegConfig::new(config.reg_weight)?;
    let alpha = config.alpha.unwrap_or(if modified {
        Alpha::InvSqrt
    } else {
        Alpha::Constant(DEFAULT_ALPHA)
    });
    let adv_step = match config.adversary_update {
        AdversaryUpdate::Learn => -config.eta1,
        AdversaryUpdate::Ascend => config.eta1,
    };

    let mut batches = rng_for(config.seed, Stream::ClassifierBatches);
    let mut noise = NoiseSource::new(config.noise_enabled, config.seed);
    let mut trace = Vec::with_capacity(config.epochs);
    let mut snapshots = Vec::with_capacity(config.epochs);
    for t in 1..=config.epochs {
        let factor = noise.next_factor();
        let data = if config.gda_minibatch {
            let mut batch = train.select(&sample_batch(&mut batches, train.n_samples(), config.batch_size));
            if !batch.has_both_groups() {
                batch = train.select(&sample_batch(&mut batches, train.n_samples(), config.batch_size));
            }
            batch.has_both_groups().then_some(Cow::Owned(batch))
        } else {
            Some(Cow::Borrowed(train))
        };
        let data = data.map(|d| if config.noise_enabled { Cow::Owned(d.scaled_features(factor)) } else { d });

        match data {
            Some(data) => {
                let x = data.features();
                let scores = predict_scores(&clf, x)?;
                let grad_c = grad_params(&clf, x, &bce_score_grad(&scores, data.labels())?)?;
                let grad_f = grad_params(&clf, x, &fairness_score_grad(&scores, data.sensitive(), &reg, &adv)?)?;
                let grad_u = grad_lf_wrt_adv(&scores, data.sensitive(), &adv)?;
                let a = alpha.at(t);
                let direction = if modified {
                    modified_direction(&grad_c, &grad_f, a)?
                } else {
                    normal_direction(&grad_c, &grad_f, a)?
                };
                clf.descend(&direction, config.eta2)?;
                adv = adv.moved(&grad_u, adv_step)?;
            }
            None => warn!("iteration {t}: mini-batch holds a single sensitive group twice in a row; skipping"),
        }
        ensure_finite(t, &clf, &adv)?;
        trace.push(record_epoch(t, &clf, &adv, split, &reg)?);
        snapshots.push((clf.clone(), adv));
    }
    let algorithm = if modified { Algorithm::GdaModified } else { Algorithm::GdaNormal };
    TrainResult::from_trace(algorithm, config, trace, snapshots)
}

/// Gradient descent-ascent with the normal update.
///
/// After pre-training, each iteration evaluates `∇_w L_C`, `∇_w L_F` and
/// `∇_u L_F` at the current `(w, u)` and then applies both updates:
/// `w ← w − η₂(∇_w L_C − α·∇_w L_F)` and the adversary step selected by
/// `config.adversary_update`. `α` defaults to [`DEFAULT_ALPHA`].
pub fn gda_normal(split: &Split, config: &TrainConfig) -> Result<TrainResult> {
    gda(split, config, false)
}

/// Gradient descent-ascent with the projection-modified update
/// `w ← w − η₂(∇_w L_C − α·∇_w L_F − Π_{∇_w L_F} ∇_w L_C)`, with
/// `α = 1/√t` unless configured otherwise.
pub fn gda_modified(split: &Split, config: &TrainConfig) -> Result<TrainResult> {
    gda(split, config, true)
}
