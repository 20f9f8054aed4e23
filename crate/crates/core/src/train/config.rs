use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::ModelKind;

/// Coupling between the classification and fairness gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Constant(f64),
    /// `α = 1/√t`, with `t` counted from 1.
    InvSqrt,
}

impl Alpha {
    pub fn at(self, t: usize) -> f64 {
        match self {
            Alpha::Constant(c) => c,
            Alpha::InvSqrt => 1.0 / (t as f64).sqrt(),
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Constant(c) => write!(f, "{c}"),
            Alpha::InvSqrt => f.write_str("inv_sqrt"),
        }
    }
}

impl FromStr for Alpha {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inv_sqrt" | "1/sqrt(t)" => Ok(Alpha::InvSqrt),
            other => match other.parse::<f64>() {
                Ok(c) if c >= 0.0 && c.is_finite() => Ok(Alpha::Constant(c)),
                _ => Err(format!("expected a non-negative number or `inv_sqrt`, got `{other}`")),
            },
        }
    }
}

/// Direction of the adversary step in gradient descent-ascent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryUpdate {
    /// `u ← u − η₁·∇_u L_F`: the adversary lowers its cross-entropy.
    Learn,
    /// `u ← u + η₁·∇_u L_F` taken literally; with `L_F` built on the
    /// adversary cross-entropy this makes the adversary unlearn.
    Ascend,
}

impl fmt::Display for AdversaryUpdate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdversaryUpdate::Learn => "learn",
            AdversaryUpdate::Ascend => "ascend",
        })
    }
}

impl FromStr for AdversaryUpdate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "learn" => Ok(AdversaryUpdate::Learn),
            "ascend" => Ok(AdversaryUpdate::Ascend),
            other => Err(format!("expected `learn` or `ascend`, got `{other}`")),
        }
    }
}

/// Hyperparameters shared by every trainer.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub model: ModelKind,
    /// Weight of the adversary loss in the alternating procedure.
    pub lambda: f64,
    /// Adversary step size.
    pub eta1: f64,
    /// Classifier step size.
    pub eta2: f64,
    /// `None` selects each trainer's default: [`DEFAULT_ALPHA`] for the
    /// normal update, `1/√t` for the modified one.
    pub alpha: Option<Alpha>,
    pub epochs: usize,
    pub batch_size: usize,
    pub pretrain_clf_epochs: usize,
    pub pretrain_adv_epochs: usize,
    /// Multiply the classifier's inputs by one `U[0,1]` draw per iteration.
    pub noise_enabled: bool,
    pub reg_weight: f64,
    pub fairness_floor: f64,
    pub seed: u64,
    /// Held-out share used by the command line front end.
    pub test_fraction: f64,
    pub adversary_update: AdversaryUpdate,
    /// Use one mini-batch per descent-ascent iteration instead of the full
    /// training set.
    pub gda_minibatch: bool,
}

/// Constant `α` of the normal descent-ascent update when none is configured.
pub const DEFAULT_ALPHA: f64 = 3.0;

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Logistic,
            lambda: 5.0,
            eta1: 1.0,
            eta2: 0.5,
            alpha: None,
            epochs: 165,
            batch_size: 128,
            pretrain_clf_epochs: 200,
            pretrain_adv_epochs: 200,
            noise_enabled: false,
            reg_weight: 1.0,
            fairness_floor: 80.0,
            seed: 0,
            test_fraction: 0.3,
            adversary_update: AdversaryUpdate::Learn,
            gda_minibatch: false,
        }
    }
}

/// Keys accepted by [`TrainConfig::set`], in echo order.
pub const CONFIG_KEYS: [&str; 16] = [
    "model",
    "lambda",
    "eta1",
    "eta2",
    "alpha",
    "epochs",
    "batch_size",
    "pretrain_clf_epochs",
    "pretrain_adv_epochs",
    "noise",
    "reg_weight",
    "fairness_floor",
    "seed",
    "test_fraction",
    "adversary_update",
    "gda_minibatch",
];

fn parse<T: FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse `{value}`"))
}

fn non_negative(value: &str) -> Result<f64, String> {
    let v: f64 = parse(value)?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite non-negative number, got `{value}`"))
    }
}

impl TrainConfig {
    /// Sets one key from its text form. The error is a bare message; callers
    /// attach the line and key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "model" => self.model = value.parse().map_err(|e: Error| e.to_string())?,
            "lambda" => self.lambda = non_negative(value)?,
            "eta1" => self.eta1 = non_negative(value)?,
            "eta2" => self.eta2 = non_negative(value)?,
            "alpha" => {
                self.alpha = match value {
                    "default" => None,
                    v => Some(v.parse()?),
                }
            }
            "epochs" => self.epochs = parse(value)?,
            "batch_size" => self.batch_size = parse(value)?,
            "pretrain_clf_epochs" => self.pretrain_clf_epochs = parse(value)?,
            "pretrain_adv_epochs" => self.pretrain_adv_epochs = parse(value)?,
            "noise" => self.noise_enabled = parse(value)?,
            "reg_weight" => self.reg_weight = non_negative(value)?,
            "fairness_floor" => self.fairness_floor = non_negative(value)?,
            "seed" => self.seed = parse(value)?,
            "test_fraction" => self.test_fraction = parse(value)?,
            "adversary_update" => self.adversary_update = value.parse()?,
            "gda_minibatch" => self.gda_minibatch = parse(value)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Applies a flat `key = value` text with `#` comments on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: i + 1,
                key: line.to_string(),
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            self.set(key, value).map_err(|message| Error::Config {
                line: i + 1,
                key: key.to_string(),
                message,
            })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.eta1 > 0.0 && self.eta2 > 0.0) {
            return fail("eta1 and eta2 must be positive");
        }
        if self.epochs < 1 {
            return fail("epochs must be at least 1");
        }
        if self.batch_size < 2 {
            return fail("batch_size must be at least 2");
        }
        if !(0.0..=100.0).contains(&self.fairness_floor) {
            return fail("fairness_floor must lie in [0, 100]");
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return fail("test_fraction must lie in (0, 1)");
        }
        Ok(())
    }

    /// Every key with its effective value, one `key = value` per line, in a
    /// form [`TrainConfig::from_text`] reads back.
    pub fn to_text(&self) -> String {
        let alpha = self.alpha.map(|a| a.to_string()).unwrap_or_else(|| "default".into());
        let values = [
            self.model.name().to_string(),
            self.lambda.to_string(),
            self.eta1.to_string(),
            self.eta2.to_string(),
            alpha,
            self.epochs.to_string(),
            self.batch_size.to_string(),
            self.pretrain_clf_epochs.to_string(),
            self.pretrain_adv_epochs.to_string(),
            self.noise_enabled.to_string(),
            self.reg_weight.to_string(),
            self.fairness_floor.to_string(),
            self.seed.to_string(),
            self.test_fraction.to_string(),
            self.adversary_update.to_string(),
            self.gda_minibatch.to_string(),
        ];
        CONFIG_KEYS
            .iter()
            .zip(values)
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let text = "# comment\nlambda = 2.5  # trailing\n\nalpha = inv_sqrt\nmodel = mlp\nnoise = true\n";
        let cfg = TrainConfig::from_text(text).unwrap();
        assert_eq!(cfg.lambda, 2.5);
        assert_eq!(cfg.alpha, Some(Alpha::InvSqrt));
        assert_eq!(cfg.model, ModelKind::Mlp);
        assert!(cfg.noise_enabled);
        assert_eq!(cfg.epochs, 165);
    }

    #[test]
    fn errors_name_line_and_key() {
        let err = TrainConfig::from_text("epochs = 3\nlambda = abc\n").unwrap_err();
        match err {
            Error::Config { line, key, .. } => {
                assert_eq!(line, 2);
                assert_eq!(key, "lambda");
            }
            other => panic!("unexpected {other}"),
        }
        assert!(matches!(
            TrainConfig::from_text("bogus = 1\n"),
            Err(Error::Config { line: 1, .. })
        ));
        assert!(matches!(
            TrainConfig::from_text("no equals sign\n"),
            Err(Error::Config { line: 1, .. })
        ));
    }

    #[test]
    fn validation() {
        assert!(TrainConfig::from_text("epochs = 0").is_err());
        assert!(TrainConfig::from_text("batch_size = 1").is_err());
        assert!(TrainConfig::from_text("eta2 = 0").is_err());
        assert!(TrainConfig::from_text("fairness_floor = 101").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let cfg = TrainConfig {
            alpha: Some(Alpha::Constant(0.25)),
            seed: 42,
            adversary_update: AdversaryUpdate::Ascend,
            ..TrainConfig::default()
        };
        assert_eq!(TrainConfig::from_text(&cfg.to_text()).unwrap(), cfg);
        assert_eq!(TrainConfig::from_text(&TrainConfig::default().to_text()).unwrap(), TrainConfig::default());
    }

    #[test]
    fn alpha_schedule_starts_at_one() {
        assert_eq!(Alpha::InvSqrt.at(1), 1.0);
        assert_eq!(Alpha::InvSqrt.at(4), 0.5);
        assert_eq!(Alpha::Constant(0.3).at(9), 0.3);
    }
}
