//! Classifier and adversary forward passes with analytic gradients.
//!
//! The classifier is either logistic regression (`σ(w·x̂)`, with the bias
//! stored as the last weight) or a fully connected network with three
//! rectified-linear hidden layers of width 32 and a sigmoid output. The
//! adversary is a logistic model over the classifier score alone.

mod snapshot;

pub use snapshot::{
    read_adversary, read_params, write_adversary, write_params, Snapshot, SNAPSHOT_HEADER,
};

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;

use crate::error::{Error, Result};

/// Widths of the hidden layers of [`ModelKind::Mlp`].
pub const HIDDEN_LAYERS: [usize; 3] = [32, 32, 32];

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Logistic,
    Mlp,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Logistic => "logistic",
            ModelKind::Mlp => "mlp",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(ModelKind::Logistic),
            "mlp" => Ok(ModelKind::Mlp),
            other => Err(Error::InvalidArgument(format!("unknown model kind `{other}`"))),
        }
    }
}

/// Which parameter object a [`GradientVector`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKind {
    Logistic,
    Mlp,
    Adversary,
}

impl ParamKind {
    pub fn name(self) -> &'static str {
        match self {
            ParamKind::Logistic => "logistic",
            ParamKind::Mlp => "mlp",
            ParamKind::Adversary => "adversary",
        }
    }
}

/// One fully connected layer, `out = W·in + b` with `W` shaped `(out, in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl DenseLayer {
    fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Self {
            weights: Array2::zeros((fan_out, fan_in)),
            bias: Array1::zeros(fan_out),
        }
    }

    fn forward(&self, input: ArrayView2<'_, f64>) -> Array2<f64> {
        input.dot(&self.weights.t()) + &self.bias
    }
}

/// Classifier parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    /// `n_features + 1` weights; the last entry multiplies the constant 1.
    Logistic { weights: Array1<f64> },
    Mlp { layers: Vec<DenseLayer> },
}

impl ModelParams {
    /// All-zero parameters of the given kind.
    pub fn zeros(kind: ModelKind, n_features: usize) -> Self {
        match kind {
            ModelKind::Logistic => ModelParams::Logistic {
                weights: Array1::zeros(n_features + 1),
            },
            ModelKind::Mlp => {
                let arch = mlp_architecture(n_features);
                ModelParams::Mlp {
                    layers: arch.windows(2).map(|w| DenseLayer::zeros(w[0], w[1])).collect(),
                }
            }
        }
    }

    /// Initial parameters: zeros for logistic regression, uniform on
    /// `±1/√fan_in` for every MLP weight and bias.
    pub fn init<R: Rng + ?Sized>(kind: ModelKind, n_features: usize, rng: &mut R) -> Self {
        let mut params = Self::zeros(kind, n_features);
        if let ModelParams::Mlp { layers } = &mut params {
            for layer in layers {
                let bound = 1.0 / (layer.weights.ncols() as f64).sqrt();
                layer.weights.mapv_inplace(|_| rng.random_range(-bound..bound));
                layer.bias.mapv_inplace(|_| rng.random_range(-bound..bound));
            }
        }
        params
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Logistic { .. } => ModelKind::Logistic,
            ModelParams::Mlp { .. } => ModelKind::Mlp,
        }
    }

    pub fn param_kind(&self) -> ParamKind {
        match self {
            ModelParams::Logistic { .. } => ParamKind::Logistic,
            ModelParams::Mlp { .. } => ParamKind::Mlp,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            ModelParams::Logistic { weights } => weights.len() - 1,
            ModelParams::Mlp { layers } => layers[0].weights.ncols(),
        }
    }

    /// Layer widths from input to output, e.g. `[n, 32, 32, 32, 1]`.
    pub fn architecture(&self) -> Vec<usize> {
        match self {
            ModelParams::Logistic { weights } => vec![weights.len() - 1, 1],
            ModelParams::Mlp { layers } => std::iter::once(layers[0].weights.ncols())
                .chain(layers.iter().map(|l| l.weights.nrows()))
                .collect(),
        }
    }

    /// Total number of scalar parameters.
    pub fn dim(&self) -> usize {
        match self {
            ModelParams::Logistic { weights } => weights.len(),
            ModelParams::Mlp { layers } => layers.iter().map(|l| l.weights.len() + l.bias.len()).sum(),
        }
    }

    /// Flattened parameters; MLP layers in order, each as row-major weights
    /// followed by the bias.
    pub fn to_flat(&self) -> Vec<f64> {
        match self {
            ModelParams::Logistic { weights } => weights.to_vec(),
            ModelParams::Mlp { layers } => {
                let mut out = Vec::with_capacity(self.dim());
                for l in layers {
                    out.extend(l.weights.iter());
                    out.extend(l.bias.iter());
                }
                out
            }
        }
    }

    /// Inverse of [`ModelParams::to_flat`] for the given architecture.
    pub fn from_flat(kind: ModelKind, architecture: &[usize], values: &[f64]) -> Result<Self> {
        let template = match kind {
            ModelKind::Logistic => {
                if architecture.len() != 2 || architecture[1] != 1 {
                    return Err(Error::InvalidArgument(format!(
                        "logistic architecture must be [n, 1], got {architecture:?}"
                    )));
                }
                Self::zeros(kind, architecture[0])
            }
            ModelKind::Mlp => {
                if architecture.len() < 2 || architecture.last() != Some(&1) {
                    return Err(Error::InvalidArgument(format!(
                        "mlp architecture must end in 1, got {architecture:?}"
                    )));
                }
                ModelParams::Mlp {
                    layers: architecture
                        .windows(2)
                        .map(|w| DenseLayer::zeros(w[0], w[1]))
                        .collect(),
                }
            }
        };
        let mut params = template;
        params.assign_flat(values)?;
        Ok(params)
    }

    fn assign_flat(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.dim() {
            return Err(Error::dims(self.dim(), values.len()));
        }
        let mut it = values.iter().copied();
        match self {
            ModelParams::Logistic { weights } => weights.iter_mut().for_each(|w| *w = it.next().unwrap()),
            ModelParams::Mlp { layers } => {
                for l in layers {
                    l.weights.iter_mut().for_each(|w| *w = it.next().unwrap());
                    l.bias.iter_mut().for_each(|w| *w = it.next().unwrap());
                }
            }
        }
        Ok(())
    }

    /// In-place update `θ ← θ − step·direction`.
    pub fn descend(&mut self, direction: &GradientVector, step: f64) -> Result<()> {
        if direction.kind != self.param_kind() {
            return Err(Error::InvalidArgument(format!(
                "gradient of kind {} applied to {} parameters",
                direction.kind.name(),
                self.param_kind().name()
            )));
        }
        if direction.len() != self.dim() {
            return Err(Error::dims(self.dim(), direction.len()));
        }
        let updated: Vec<f64> = self
            .to_flat()
            .iter()
            .zip(direction.values())
            .map(|(w, d)| w - step * d)
            .collect();
        self.assign_flat(&updated)
    }

    pub fn is_finite(&self) -> bool {
        self.to_flat().iter().all(|v| v.is_finite())
    }
}

fn mlp_architecture(n_features: usize) -> Vec<usize> {
    std::iter::once(n_features)
        .chain(HIDDEN_LAYERS)
        .chain(std::iter::once(1))
        .collect()
}

/// Adversary weights `(u₀, u₁)`: it outputs `σ(u₀·score + u₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdversaryParams {
    pub weights: [f64; 2],
}

impl AdversaryParams {
    pub fn new(slope: f64, intercept: f64) -> Self {
        Self {
            weights: [slope, intercept],
        }
    }

    pub fn slope(&self) -> f64 {
        self.weights[0]
    }

    pub fn intercept(&self) -> f64 {
        self.weights[1]
    }

    /// `u + step·direction`; pass a negative step to descend.
    pub fn moved(&self, direction: &GradientVector, step: f64) -> Result<Self> {
        if direction.kind != ParamKind::Adversary || direction.len() != 2 {
            return Err(Error::dims(2, direction.len()));
        }
        let d = direction.values();
        Ok(Self::new(
            self.weights[0] + step * d[0],
            self.weights[1] + step * d[1],
        ))
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|v| v.is_finite())
    }
}

/// A flat gradient tagged with the parameter object it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector {
    kind: ParamKind,
    values: Vec<f64>,
}

impl GradientVector {
    pub fn new(kind: ParamKind, values: Vec<f64>) -> Self {
        Self { kind, values }
    }

    pub fn zeros(kind: ParamKind, len: usize) -> Self {
        Self::new(kind, vec![0.0; len])
    }

    pub fn kind(&self) -> ParamKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check(&self, other: &GradientVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::dims(self.len(), other.len()));
        }
        if self.kind != other.kind {
            return Err(Error::InvalidArgument(format!(
                "gradient kinds differ: {} vs {}",
                self.kind.name(),
                other.kind.name()
            )));
        }
        Ok(())
    }

    pub fn dot(&self, other: &GradientVector) -> Result<f64> {
        self.check(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> GradientVector {
        Self::new(self.kind, self.values.iter().map(|v| v * factor).collect())
    }

    /// `self + factor·other`.
    pub fn add_scaled(&self, other: &GradientVector, factor: f64) -> Result<GradientVector> {
        self.check(other)?;
        Ok(Self::new(
            self.kind,
            self.values.iter().zip(&other.values).map(|(a, b)| a + factor * b).collect(),
        ))
    }

    pub fn sub(&self, other: &GradientVector) -> Result<GradientVector> {
        self.check(other)?;
        Ok(Self::new(
            self.kind,
            self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

fn check_width(params: &ModelParams, features: &Array2<f64>) -> Result<()> {
    if features.ncols() != params.n_features() {
        return Err(Error::dims(params.n_features(), features.ncols()));
    }
    Ok(())
}

/// Pre-activations of every MLP layer plus the hidden activations.
struct MlpTrace {
    /// Inputs to each layer: the features, then the hidden activations.
    inputs: Vec<Array2<f64>>,
    /// Pre-activation of each layer.
    pre: Vec<Array2<f64>>,
}

fn mlp_forward(layers: &[DenseLayer], features: &Array2<f64>) -> MlpTrace {
    let mut inputs = vec![features.clone()];
    let mut pre = Vec::with_capacity(layers.len());
    for (k, layer) in layers.iter().enumerate() {
        let z = layer.forward(inputs[k].view());
        if k + 1 < layers.len() {
            inputs.push(z.mapv(|v| v.max(0.0)));
        }
        pre.push(z);
    }
    MlpTrace { inputs, pre }
}

/// Output logits, one per row.
fn logits(params: &ModelParams, features: &Array2<f64>) -> Array1<f64> {
    match params {
        ModelParams::Logistic { weights } => {
            let p = weights.len() - 1;
            features.dot(&weights.slice(ndarray::s![..p])) + weights[p]
        }
        ModelParams::Mlp { layers } => {
            let trace = mlp_forward(layers, features);
            trace.pre.last().expect("at least one layer").column(0).to_owned()
        }
    }
}

/// Probability of the positive class for every row.
pub fn predict_scores(params: &ModelParams, features: &Array2<f64>) -> Result<Vec<f64>> {
    check_width(params, features)?;
    Ok(logits(params, features).iter().map(|&z| sigmoid(z)).collect())
}

/// Gradient of `Σᵢ loss(scoreᵢ)` with respect to the classifier parameters,
/// given `∂loss/∂scoreᵢ` for every row.
pub fn grad_params(
    params: &ModelParams,
    features: &Array2<f64>,
    per_row_loss_grad: &[f64],
) -> Result<GradientVector> {
    check_width(params, features)?;
    if per_row_loss_grad.len() != features.nrows() {
        return Err(Error::dims(features.nrows(), per_row_loss_grad.len()));
    }
    match params {
        ModelParams::Logistic { weights } => {
            let z = logits(params, features);
            let dlogit: Array1<f64> = z
                .iter()
                .zip(per_row_loss_grad)
                .map(|(&z, &g)| {
                    let s = sigmoid(z);
                    g * s * (1.0 - s)
                })
                .collect();
            let mut grad = features.t().dot(&dlogit).to_vec();
            grad.push(dlogit.sum());
            debug_assert_eq!(grad.len(), weights.len());
            Ok(GradientVector::new(ParamKind::Logistic, grad))
        }
        ModelParams::Mlp { layers } => {
            let trace = mlp_forward(layers, features);
            let out = trace.pre.last().expect("at least one layer");
            let mut delta: Array2<f64> = Array2::from_shape_fn((features.nrows(), 1), |(i, _)| {
                let s = sigmoid(out[[i, 0]]);
                per_row_loss_grad[i] * s * (1.0 - s)
            });
            let mut per_layer = Vec::with_capacity(layers.len());
            for k in (0..layers.len()).rev() {
                let dw = delta.t().dot(&trace.inputs[k]);
                let db = delta.sum_axis(Axis(0));
                if k > 0 {
                    let mut back = delta.dot(&layers[k].weights);
                    back.zip_mut_with(&trace.pre[k - 1], |d, &z| {
                        if z <= 0.0 {
                            *d = 0.0;
                        }
                    });
                    delta = back;
                }
                per_layer.push((dw, db));
            }
            let mut grad = Vec::with_capacity(params.dim());
            for (dw, db) in per_layer.into_iter().rev() {
                grad.extend(dw.iter());
                grad.extend(db.iter());
            }
            Ok(GradientVector::new(ParamKind::Mlp, grad))
        }
    }
}

/// The adversary's probability that each row belongs to the protected group.
pub fn adversary_scores(adv: &AdversaryParams, clf_scores: &[f64]) -> Vec<f64> {
    clf_scores
        .iter()
        .map(|&s| sigmoid(adv.slope() * s + adv.intercept()))
        .collect()
}
