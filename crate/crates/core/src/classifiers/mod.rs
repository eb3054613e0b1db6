//! Success-probability models.
//!
//! Both classifiers implement [`SuccessPredictor`], the only interface the
//! genetic algorithm needs. Trained models serialize to JSON through
//! [`ModelFile`] so training and optimization can run as separate steps.

mod lr;
mod nbc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{CauseCatalog, SurveyDataset, SCALE_MAX, SCALE_MIN};

pub use lr::{lr_predict, train_lr, LogLikelihood, LrDiagnostics, LrHyperparams, TrainedLr};
pub use nbc::{nbc_predict, train_nbc, TrainedNbc};

/// Version of the serialized model layout.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("single-class dataset: all {rows} rows are {class}")]
    SingleClass { rows: usize, class: &'static str },
    #[error("smoothing alpha must be finite and >= 0, got {0}")]
    InvalidAlpha(f64),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparams(String),
    #[error("non-finite log-likelihood at epoch {epoch}; learning rate {learning_rate} is too large")]
    NonFiniteLoss { epoch: usize, learning_rate: f64 },
    #[error("model expects {expected} scales, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("scale {value} of input {index} outside [1,9]")]
    ScaleOutOfRange { index: usize, value: u8 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("malformed model file: {0}")]
    Malformed(String),
}

/// Maps a factor profile to the probability that the project succeeds.
pub trait SuccessPredictor: Send + Sync {
    fn n_causes(&self) -> usize;

    /// `P(success | scales)`, always in `[0, 1]`.
    fn predict(&self, scales: &[u8]) -> Result<f64, ModelError>;

    fn predict_failure(&self, scales: &[u8]) -> Result<f64, ModelError> {
        Ok(1.0 - self.predict(scales)?)
    }
}

impl<P: SuccessPredictor + ?Sized> SuccessPredictor for &P {
    fn n_causes(&self) -> usize {
        (**self).n_causes()
    }
    fn predict(&self, scales: &[u8]) -> Result<f64, ModelError> {
        (**self).predict(scales)
    }
}

/// A predictor returning the same probability for every valid input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantPredictor {
    pub probability: f64,
    pub n_causes: usize,
}

impl ConstantPredictor {
    pub fn new(probability: f64, n_causes: usize) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&probability) {
            return Err(ModelError::InvalidModel(format!("constant probability {probability} outside [0,1]")));
        }
        Ok(Self { probability, n_causes })
    }
}

impl SuccessPredictor for ConstantPredictor {
    fn n_causes(&self) -> usize {
        self.n_causes
    }
    fn predict(&self, scales: &[u8]) -> Result<f64, ModelError> {
        check_scales(scales, self.n_causes)?;
        Ok(self.probability)
    }
}

pub(crate) fn check_scales(scales: &[u8], n: usize) -> Result<(), ModelError> {
    if scales.len() != n {
        return Err(ModelError::DimensionMismatch { expected: n, found: scales.len() });
    }
    match scales.iter().position(|s| !(SCALE_MIN..=SCALE_MAX).contains(s)) {
        Some(index) => Err(ModelError::ScaleOutOfRange { index, value: scales[index] }),
        None => Ok(()),
    }
}

pub(crate) fn check_trainable(dataset: &SurveyDataset) -> Result<(usize, usize), ModelError> {
    if dataset.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    match dataset.class_counts() {
        (0, s) => Err(ModelError::SingleClass { rows: s, class: "successes" }),
        (f, 0) => Err(ModelError::SingleClass { rows: f, class: "failures" }),
        counts => Ok(counts),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Nbc,
    Lr,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Nbc => "nbc",
            ModelKind::Lr => "lr",
        }
    }

    /// Display name used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::Nbc => "Naive-Bayes",
            ModelKind::Lr => "Logistic-regression",
        }
    }
}

/// A trained model of either family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Nbc(TrainedNbc),
    Lr(TrainedLr),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Nbc(_) => ModelKind::Nbc,
            Model::Lr(_) => ModelKind::Lr,
        }
    }
}

impl SuccessPredictor for Model {
    fn n_causes(&self) -> usize {
        match self {
            Model::Nbc(m) => m.n_causes(),
            Model::Lr(m) => m.n_causes(),
        }
    }
    fn predict(&self, scales: &[u8]) -> Result<f64, ModelError> {
        match self {
            Model::Nbc(m) => m.predict(scales),
            Model::Lr(m) => m.predict(scales),
        }
    }
}

/// On-disk model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub cause_ids: Vec<String>,
    pub model: Model,
}

impl ModelFile {
    pub fn new(catalog: &CauseCatalog, model: Model) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            cause_ids: catalog.ids().map(String::from).collect(),
            model,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes") + "\n"
    }

    /// Parses and re-validates a model document.
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(ModelError::UnsupportedVersion(file.format_version));
        }
        match &file.model {
            Model::Nbc(m) => m.validate()?,
            Model::Lr(m) => m.validate()?,
        }
        if file.cause_ids.len() != file.model.n_causes() {
            return Err(ModelError::InvalidModel(format!(
                "{} cause ids for a {}-cause model",
                file.cause_ids.len(),
                file.model.n_causes()
            )));
        }
        Ok(file)
    }
}
