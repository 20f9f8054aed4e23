use log::warn;

use super::{rng_for, Stream, TrainConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::losses::{adversary_loss, bce, bce_score_grad, grad_lf_wrt_adv};
use crate::model::{adversary_scores, grad_params, predict_scores, AdversaryParams, ModelParams};

/// Full-batch gradient descent on `L_C` with step `eta2` for
/// `pretrain_clf_epochs` epochs, from the seeded initialization.
///
/// If the training loss goes up from one epoch to the next the step is
/// halved for the remaining epochs.
pub fn pretrain_classifier(dataset: &Dataset, config: &TrainConfig) -> Result<ModelParams> {
    let mut rng = rng_for(config.seed, Stream::Init);
    let mut params = ModelParams::init(config.model, dataset.n_features(), &mut rng);
    let mut step = config.eta2;
    let mut previous = f64::INFINITY;
    for epoch in 1..=config.pretrain_clf_epochs {
        let scores = predict_scores(&params, dataset.features())?;
        let loss = bce(&scores, dataset.labels())?.value;
        if !loss.is_finite() {
            return Err(Error::Divergence {
                iteration: epoch,
                what: "classifier pre-training loss".into(),
            });
        }
        if loss > previous {
            step *= 0.5;
            warn!("pre-training loss rose at epoch {epoch}; step halved to {step:e}");
        }
        previous = loss;
        let dscore = bce_score_grad(&scores, dataset.labels())?;
        let grad = grad_params(&params, dataset.features(), &dscore)?;
        params.descend(&grad, step)?;
        if !params.is_finite() {
            return Err(Error::Divergence {
                iteration: epoch,
                what: "classifier parameters during pre-training".into(),
            });
        }
    }
    Ok(params)
}

/// Full-batch gradient descent on the adversary cross-entropy with the
/// classifier frozen, starting from `u = (0, 0)`.
pub fn pretrain_adversary(clf: &ModelParams, dataset: &Dataset, config: &TrainConfig) -> Result<AdversaryParams> {
    let scores = predict_scores(clf, dataset.features())?;
    let mut adv = AdversaryParams::default();
    for epoch in 1..=config.pretrain_adv_epochs {
        let grad = grad_lf_wrt_adv(&scores, dataset.sensitive(), &adv)?;
        adv = adv.moved(&grad, -config.eta1)?;
        if !adv.is_finite() {
            return Err(Error::Divergence {
                iteration: epoch,
                what: "adversary parameters during pre-training".into(),
            });
        }
    }
    let loss = adversary_loss(&adversary_scores(&adv, &scores), dataset.sensitive())?;
    if !loss.value.is_finite() {
        return Err(Error::Divergence {
            iteration: config.pretrain_adv_epochs,
            what: "adversary pre-training loss".into(),
        });
    }
    Ok(adv)
}
