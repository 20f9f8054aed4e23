use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Dataset;
use crate::error::{Error, Result};

/// Multiplier on `bias` for the sensitive attribute leaking into feature 0.
const PROXY_SCALE: f64 = 2.0;
/// Multiplier on `bias` for the direct effect of the sensitive attribute on
/// the latent score.
const LABEL_SCALE: f64 = 2.0;
/// Standard deviation of the latent-score noise.
const LATENT_NOISE: f64 = 0.5;

/// Synthetic data whose labels favour the protected group.
///
/// `z ~ Bernoulli(0.5)`, `x ~ N(0, I)` with `2·bias·z` added to the first
/// feature (a proxy that lets a classifier recover `z` without seeing it),
/// a unit-norm ground-truth direction over the remaining features drawn
/// from the seed, latent score `s = w·x + 2·bias·z + noise`, and `y = 1`
/// iff `s` exceeds its median.
/// The sensitive attribute itself is not a feature.
pub fn synth_biased(n: usize, bias: f64, n_features: usize, seed: u64) -> Result<Dataset> {
    if n < 20 {
        return Err(Error::InvalidArgument(format!("need at least 20 samples, got {n}")));
    }
    if n_features < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 features, got {n_features}"
        )));
    }
    if !(0.0..=1.0).contains(&bias) {
        return Err(Error::InvalidArgument(format!("bias must lie in [0, 1], got {bias}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut truth: Vec<f64> = (0..n_features).map(|_| rng.sample(StandardNormal)).collect();
    truth[0] = 0.0;
    let norm = truth.iter().map(|v| v * v).sum::<f64>().sqrt();
    truth.iter_mut().for_each(|v| *v /= norm);

    let mut features = Array2::<f64>::zeros((n, n_features));
    let mut sensitive = Vec::with_capacity(n);
    let mut latent = Vec::with_capacity(n);
    for i in 0..n {
        let z = rng.random_bool(0.5) as u8;
        let mut row = features.row_mut(i);
        for v in row.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        row[0] += PROXY_SCALE * bias * z as f64;
        let noise: f64 = rng.sample(StandardNormal);
        let s = row.iter().zip(&truth).map(|(x, w)| x * w).sum::<f64>()
            + LABEL_SCALE * bias * z as f64
            + LATENT_NOISE * noise;
        sensitive.push(z);
        latent.push(s);
    }

    let median = median(&latent);
    let labels = latent.iter().map(|&s| (s > median) as u8).collect();
    let names = (0..n_features).map(|j| format!("x{j}")).collect();
    Dataset::new(features, labels, sensitive, names)
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[m - 1] + sorted[m])
    } else {
        sorted[m]
    }
}
