//! Classifier loss `L_C`, adversary loss and the fairness loss `L_F`.
//!
//! * `L_C` is the mean binary cross-entropy of the classifier scores against
//!   the labels.
//! * The adversary loss is the same cross-entropy of the adversary scores
//!   against the sensitive attribute.
//! * `L_F = adversary loss − reg_weight · gap²`, where `gap` is the
//!   difference of mean classifier scores between the two sensitive groups.
//!
//! Sign convention: a classifier step along `+∇_w L_F` makes the adversary
//! less accurate and shrinks the group gap. The gradient updates in
//! [`crate::train`] rely on this.
//!
//! Log arguments are clamped to `[ε, 1−ε]`; the gradients below are exact
//! derivatives of the clamped losses, so they vanish in the clamped region.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{adversary_scores, grad_params, predict_scores, AdversaryParams, GradientVector, ModelParams, ParamKind};

/// Default clamp for log arguments.
pub const LOG_EPS: f64 = 1e-12;

/// A mean loss together with the number of rows it averages.
///
/// `L_F` can be negative because of its subtracted regularizer; every
/// other loss here is non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossValue {
    pub value: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairRegConfig {
    /// Weight of the squared demographic-parity gap inside `L_F`.
    pub reg_weight: f64,
    pub epsilon: f64,
}

impl Default for FairRegConfig {
    fn default() -> Self {
        Self {
            reg_weight: 0.0,
            epsilon: LOG_EPS,
        }
    }
}

impl FairRegConfig {
    pub fn new(reg_weight: f64) -> Result<Self> {
        if !(reg_weight >= 0.0 && reg_weight.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "reg_weight must be a finite non-negative number, got {reg_weight}"
            )));
        }
        Ok(Self {
            reg_weight,
            epsilon: LOG_EPS,
        })
    }
}

fn check_pair(scores: &[f64], targets: &[u8]) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::EmptyTable);
    }
    if scores.len() != targets.len() {
        return Err(Error::dims(scores.len(), targets.len()));
    }
    if targets.iter().any(|&t| t > 1) {
        return Err(Error::InvalidArgument("targets must be 0 or 1".into()));
    }
    Ok(())
}

fn cross_entropy(scores: &[f64], targets: &[u8], eps: f64) -> Result<LossValue> {
    check_pair(scores, targets)?;
    let total: f64 = scores
        .iter()
        .zip(targets)
        .map(|(&s, &t)| {
            let s = s.clamp(eps, 1.0 - eps);
            if t == 1 {
                -s.ln()
            } else {
                -(1.0 - s).ln()
            }
        })
        .sum();
    Ok(LossValue {
        value: total / scores.len() as f64,
        n: scores.len(),
    })
}

fn unclamped(s: f64, eps: f64) -> bool {
    s >= eps && s <= 1.0 - eps
}

/// Mean binary cross-entropy.
pub fn bce(scores: &[f64], targets: &[u8]) -> Result<LossValue> {
    cross_entropy(scores, targets, LOG_EPS)
}

/// `∂ bce / ∂ scoreᵢ` for every row.
pub fn bce_score_grad(scores: &[f64], targets: &[u8]) -> Result<Vec<f64>> {
    check_pair(scores, targets)?;
    let n = scores.len() as f64;
    Ok(scores
        .iter()
        .zip(targets)
        .map(|(&s, &t)| {
            if unclamped(s, LOG_EPS) {
                (s - t as f64) / (s * (1.0 - s) * n)
            } else {
                0.0
            }
        })
        .collect())
}

/// Cross-entropy of the adversary's guesses against the sensitive attribute.
pub fn adversary_loss(adv_scores: &[f64], sensitive: &[u8]) -> Result<LossValue> {
    bce(adv_scores, sensitive)
}

/// Row counts of the two groups, erroring if either is empty.
fn group_counts(sensitive: &[u8]) -> Result<(usize, usize)> {
    let ones = sensitive.iter().filter(|&&z| z == 1).count();
    let zeros = sensitive.len() - ones;
    if zeros == 0 {
        return Err(Error::EmptyGroup(0));
    }
    if ones == 0 {
        return Err(Error::EmptyGroup(1));
    }
    Ok((zeros, ones))
}

/// `mean(score | z=1) − mean(score | z=0)`.
pub fn demographic_gap(clf_scores: &[f64], sensitive: &[u8]) -> Result<f64> {
    check_pair(clf_scores, sensitive)?;
    let (n0, n1) = group_counts(sensitive)?;
    let (mut s0, mut s1) = (0.0, 0.0);
    for (&s, &z) in clf_scores.iter().zip(sensitive) {
        if z == 1 {
            s1 += s;
        } else {
            s0 += s;
        }
    }
    Ok(s1 / n1 as f64 - s0 / n0 as f64)
}

/// `L_F = adversary_loss(σ(u₀·score + u₁), z) − reg_weight · gap²`.
pub fn fairness_loss(
    clf_scores: &[f64],
    sensitive: &[u8],
    cfg: &FairRegConfig,
    adv: &AdversaryParams,
) -> Result<LossValue> {
    let gap = demographic_gap(clf_scores, sensitive)?;
    let adv_part = cross_entropy(&adversary_scores(adv, clf_scores), sensitive, cfg.epsilon)?;
    Ok(LossValue {
        value: adv_part.value - cfg.reg_weight * gap * gap,
        n: adv_part.n,
    })
}

/// `∇_u L_F`. The regularizer does not depend on `u`, so this is the
/// gradient of the adversary cross-entropy alone.
pub fn grad_lf_wrt_adv(
    clf_scores: &[f64],
    sensitive: &[u8],
    adv: &AdversaryParams,
) -> Result<GradientVector> {
    check_pair(clf_scores, sensitive)?;
    let n = clf_scores.len() as f64;
    let a = adversary_scores(adv, clf_scores);
    let mut g = [0.0; 2];
    for ((&s, &z), &a) in clf_scores.iter().zip(sensitive).zip(&a) {
        if unclamped(a, LOG_EPS) {
            let d = (a - z as f64) / n;
            g[0] += d * s;
            g[1] += d;
        }
    }
    Ok(GradientVector::new(ParamKind::Adversary, g.to_vec()))
}

/// `∂ adversary_loss / ∂ scoreᵢ` for every row, through the adversary's
/// input. Unlike [`fairness_score_grad`] this needs no group structure.
pub fn adversary_score_grad(clf_scores: &[f64], sensitive: &[u8], adv: &AdversaryParams, eps: f64) -> Result<Vec<f64>> {
    check_pair(clf_scores, sensitive)?;
    let n = clf_scores.len() as f64;
    Ok(adversary_scores(adv, clf_scores)
        .iter()
        .zip(sensitive)
        .map(|(&a, &z)| if unclamped(a, eps) { (a - z as f64) * adv.slope() / n } else { 0.0 })
        .collect())
}

/// `∂ L_F / ∂ scoreᵢ` for every row.
pub fn fairness_score_grad(
    clf_scores: &[f64],
    sensitive: &[u8],
    cfg: &FairRegConfig,
    adv: &AdversaryParams,
) -> Result<Vec<f64>> {
    let gap = demographic_gap(clf_scores, sensitive)?;
    let (n0, n1) = group_counts(sensitive)?;
    let reg = 2.0 * cfg.reg_weight * gap;
    let adv_part = adversary_score_grad(clf_scores, sensitive, adv, cfg.epsilon)?;
    Ok(adv_part
        .iter()
        .zip(sensitive)
        .map(|(&d, &z)| {
            let gap_part = if z == 1 { 1.0 / n1 as f64 } else { -1.0 / n0 as f64 };
            d - reg * gap_part
        })
        .collect())
}

/// `∇_w L_C` on a batch.
pub fn grad_lc_wrt_clf(params: &ModelParams, batch: &Dataset) -> Result<GradientVector> {
    let scores = predict_scores(params, batch.features())?;
    let dscore = bce_score_grad(&scores, batch.labels())?;
    grad_params(params, batch.features(), &dscore)
}

/// `∇_w L_F` on a batch, through both the adversary input and the gap term.
pub fn grad_lf_wrt_clf(
    params: &ModelParams,
    batch: &Dataset,
    adv: &AdversaryParams,
    cfg: &FairRegConfig,
) -> Result<GradientVector> {
    let scores = predict_scores(params, batch.features())?;
    let dscore = fairness_score_grad(&scores, batch.sensitive(), cfg, adv)?;
    grad_params(params, batch.features(), &dscore)
}
