//! Fairness-constrained training for binary classifiers.
//!
//! A classifier is trained against an adversary that tries to recover a
//! binary sensitive attribute from the classifier's score. Three training
//! procedures are provided:
//!
//! * [`train::adversarial_train`]: pre-train both players, then alternate a
//!   full adversary epoch with a single classifier mini-batch step.
//! * [`train::gda_normal`]: simultaneous gradient descent-ascent where the
//!   classifier follows `∇L_C − α·∇L_F`.
//! * [`train::gda_modified`]: the same, with the projection of `∇L_C` onto
//!   `∇L_F` removed from the classifier step and `α = 1/√t`.
//!
//! Fairness is measured by the statistical rate (p% rule), see
//! [`metrics::statistical_rate`].

pub mod data;
pub mod error;
pub mod losses;
pub mod metrics;
pub mod model;
pub mod train;

pub use data::{Dataset, RawTable, Split};
pub use error::{Error, Result};
pub use metrics::FairnessReport;
pub use model::{AdversaryParams, GradientVector, ModelKind, ModelParams, ParamKind};
pub use train::{Algorithm, EpochRecord, TrainConfig, TrainResult};
