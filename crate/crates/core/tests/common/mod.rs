//! Independent oracles shared by the integration suites.

#![allow(dead_code)]

use fairmax_core::data::{split, synth_biased, Dataset};
use fairmax_core::losses::{bce, fairness_loss, grad_lc_wrt_clf, grad_lf_wrt_clf, FairRegConfig};
use fairmax_core::model::{predict_scores, AdversaryParams, GradientVector, ModelKind, ModelParams, ParamKind};
use fairmax_core::train::{train, Algorithm, TrainConfig, TrainResult};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const FD_STEP: f64 = 1e-5;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Gaussian features with random labels and both sensitive groups present.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, n_features: usize) -> Dataset {
    let features = Array2::from_shape_fn((n, n_features), |_| normal(rng));
    let labels = (0..n).map(|_| rng.random_bool(0.5) as u8).collect();
    let mut sensitive: Vec<u8> = (0..n).map(|_| rng.random_bool(0.5) as u8).collect();
    sensitive[0] = 0;
    sensitive[1] = 1;
    let names = (0..n_features).map(|j| format!("f{j}")).collect();
    Dataset::new(features, labels, sensitive, names).unwrap()
}

/// Seeded initialization with every parameter jittered, so biases and
/// weights are all away from zero.
pub fn random_params(rng: &mut ChaCha8Rng, kind: ModelKind, n_features: usize) -> ModelParams {
    let base = ModelParams::init(kind, n_features, rng);
    let values: Vec<f64> = base.to_flat().iter().map(|v| v + 0.3 * normal(rng)).collect();
    ModelParams::from_flat(kind, &base.architecture(), &values).unwrap()
}

pub fn random_adversary(rng: &mut ChaCha8Rng) -> AdversaryParams {
    AdversaryParams::new(2.0 * normal(rng), normal(rng))
}

/// Central differences of `f` around `x`, one coordinate at a time.
pub fn central_differences(x: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + FD_STEP;
            let up = f(&probe);
            probe[i] = x[i] - FD_STEP;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * FD_STEP)
        })
        .collect()
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)`, zero when both vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm(a).max(norm(b));
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

/// Largest relative error of the analytic `∇_w L_C` and `∇_w L_F` against
/// central differences at `points` seeded random problems.
pub fn gradient_check(kind: ModelKind, points: usize, seed: u64) -> (f64, f64) {
    let mut rng = rng(seed);
    let reg = FairRegConfig::new(0.7).unwrap();
    let (mut worst_c, mut worst_f) = (0.0f64, 0.0f64);
    for _ in 0..points {
        let ds = random_dataset(&mut rng, 24, 4);
        let params = random_params(&mut rng, kind, 4);
        let adv = random_adversary(&mut rng);
        let arch = params.architecture();
        let at = |w: &[f64]| ModelParams::from_flat(kind, &arch, w).unwrap();
        let scores = |w: &[f64]| predict_scores(&at(w), ds.features()).unwrap();
        let flat = params.to_flat();

        let fd_c = central_differences(&flat, |w| bce(&scores(w), ds.labels()).unwrap().value);
        let an_c = grad_lc_wrt_clf(&params, &ds).unwrap();
        worst_c = worst_c.max(relative_error(an_c.values(), &fd_c));

        let fd_f = central_differences(&flat, |w| {
            fairness_loss(&scores(w), ds.sensitive(), &reg, &adv).unwrap().value
        });
        let an_f = grad_lf_wrt_clf(&params, &ds, &adv, &reg).unwrap();
        worst_f = worst_f.max(relative_error(an_f.values(), &fd_f));
    }
    (worst_c, worst_f)
}

/// p% from raw counts.
pub fn counting_rate(predictions: &[u8], sensitive: &[u8]) -> f64 {
    let (mut pos1, mut n1, mut pos0, mut n0) = (0u64, 0u64, 0u64, 0u64);
    for (&p, &z) in predictions.iter().zip(sensitive) {
        if z == 1 {
            n1 += 1;
            pos1 += p as u64;
        } else {
            n0 += 1;
            pos0 += p as u64;
        }
    }
    let r1 = pos1 as f64 / n1 as f64;
    let r0 = pos0 as f64 / n0 as f64;
    if r1 == 0.0 && r0 == 0.0 {
        100.0
    } else if r1 == 0.0 || r0 == 0.0 {
        0.0
    } else {
        100.0 * (r1 / r0).min(r0 / r1)
    }
}

/// AUC by comparing every positive with every negative.
pub fn pair_counting_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

pub fn gv(values: Vec<f64>) -> GradientVector {
    GradientVector::new(ParamKind::Logistic, values)
}

pub fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len().is_multiple_of(2) {
        0.5 * (values[m - 1] + values[m])
    } else {
        values[m]
    }
}

pub const DIRECTIONAL_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
pub const DIRECTIONAL_N: usize = 5000;
pub const DIRECTIONAL_BIAS: f64 = 0.8;
pub const DIRECTIONAL_FEATURES: usize = 8;

/// Runs `algorithm` with default settings on the seeded synthetic problem.
pub fn directional_run(algorithm: Algorithm, seed: u64) -> TrainResult {
    let ds = synth_biased(DIRECTIONAL_N, DIRECTIONAL_BIAS, DIRECTIONAL_FEATURES, seed).unwrap();
    let sp = split(&ds, 0.3, seed).unwrap();
    let cfg = TrainConfig {
        seed,
        ..TrainConfig::default()
    };
    train(algorithm, &sp, &cfg).unwrap()
}
