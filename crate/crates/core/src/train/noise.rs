use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{rng_for, Stream};

/// Multiplies every feature by one scalar drawn uniformly from `[0, 1)`.
/// Returns the scaled matrix and the draw.
pub fn inject_noise<R: Rng + ?Sized>(features: &Array2<f64>, rng: &mut R) -> (Array2<f64>, f64) {
    let factor: f64 = rng.random();
    (features * factor, factor)
}

/// Per-iteration noise factors for a training run: `1.0` when disabled.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    rng: Option<ChaCha8Rng>,
}

impl NoiseSource {
    pub fn new(enabled: bool, seed: u64) -> Self {
        Self {
            rng: enabled.then(|| rng_for(seed, Stream::Noise)),
        }
    }

    pub fn next_factor(&mut self) -> f64 {
        match &mut self.rng {
            Some(rng) => rng.random(),
            None => 1.0,
        }
    }
}
