use serde::{Deserialize, Serialize};

use super::{check_scales, check_trainable, ModelError, SuccessPredictor};
use crate::dataset::{Outcome, SurveyDataset};
use crate::special::logistic;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrHyperparams {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Stop once every gradient component is below this in absolute value.
    pub tolerance: f64,
    /// L2 penalty on the non-intercept coefficients. 0 disables it.
    pub l2: f64,
}

impl Default for LrHyperparams {
    fn default() -> Self {
        Self { learning_rate: 0.05, max_epochs: 50_000, tolerance: 1e-6, l2: 0.0 }
    }
}

impl LrHyperparams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::InvalidHyperparams(m));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be > 0, got {}", self.learning_rate));
        }
        if self.max_epochs == 0 {
            return bad("max epochs must be positive".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad(format!("tolerance must be > 0, got {}", self.tolerance));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return bad(format!("l2 strength must be >= 0, got {}", self.l2));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrDiagnostics {
    /// Number of gradient steps taken.
    pub epochs: usize,
    pub max_abs_gradient: f64,
    pub log_likelihood: f64,
    /// False when `max_epochs` ran out before the gradient fell below tolerance.
    pub converged: bool,
}

/// Logistic regression on standardized features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedLr {
    pub beta0: f64,
    pub beta: Vec<f64>,
    pub feature_center: Vec<f64>,
    pub feature_scale: Vec<f64>,
    pub diagnostics: LrDiagnostics,
}

/// Mean log-likelihood of a logistic model over a standardized design.
///
/// Parameters are laid out as `[beta0, beta_1, ..., beta_n]`.
#[derive(Debug, Clone)]
pub struct LogLikelihood {
    n: usize,
    features: Vec<f64>,
    labels: Vec<f64>,
    l2: f64,
}

impl LogLikelihood {
    pub fn new(dataset: &SurveyDataset, center: &[f64], scale: &[f64], l2: f64) -> Self {
        let n = dataset.n_causes();
        let mut features = Vec::with_capacity(n * dataset.len());
        let mut labels = Vec::with_capacity(dataset.len());
        for row in dataset.rows() {
            for (i, &s) in row.scales.iter().enumerate() {
                features.push((s as f64 - center[i]) / scale[i]);
            }
            labels.push(if row.outcome == Outcome::Success { 1.0 } else { 0.0 });
        }
        Self { n, features, labels, l2 }
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn value(&self, params: &[f64]) -> f64 {
        self.value_and_gradient(params).0
    }

    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        self.value_and_gradient(params).1
    }

    pub fn value_and_gradient(&self, params: &[f64]) -> (f64, Vec<f64>) {
        assert_eq!(params.len(), self.dim());
        let (b0, beta) = params.split_first().unwrap();
        let mut grad = vec![0.0; self.dim()];
        let mut ll = 0.0;
        for (x, &y) in self.features.chunks_exact(self.n).zip(&self.labels) {
            let z = b0 + x.iter().zip(beta).map(|(xi, bi)| xi * bi).sum::<f64>();
            // y*z - log(1 + e^z), written to stay finite for large |z|
            ll += y * z - (z.max(0.0) + (-z.abs()).exp().ln_1p());
            let residual = y - logistic(z);
            grad[0] += residual;
            for (g, xi) in grad[1..].iter_mut().zip(x) {
                *g += residual * xi;
            }
        }
        let m = self.labels.len() as f64;
        ll /= m;
        for g in &mut grad {
            *g /= m;
        }
        if self.l2 > 0.0 {
            ll -= 0.5 * self.l2 * beta.iter().map(|b| b * b).sum::<f64>();
            for (g, b) in grad[1..].iter_mut().zip(beta) {
                *g -= self.l2 * b;
            }
        }
        (ll, grad)
    }
}

/// Full-batch gradient ascent on the mean log-likelihood.
///
/// Features are standardized to zero mean and unit population variance
/// (constant columns keep scale 1); the transform is stored on the model.
pub fn train_lr(dataset: &SurveyDataset, hyper: &LrHyperparams) -> Result<TrainedLr, ModelError> {
    hyper.validate()?;
    check_trainable(dataset)?;

    let n = dataset.n_causes();
    let m = dataset.len() as f64;
    let mut center = vec![0.0; n];
    for row in dataset.rows() {
        for (c, &s) in center.iter_mut().zip(&row.scales) {
            *c += s as f64;
        }
    }
    center.iter_mut().for_each(|c| *c /= m);
    let mut scale = vec![0.0; n];
    for row in dataset.rows() {
        for ((v, &s), c) in scale.iter_mut().zip(&row.scales).zip(&center) {
            *v += (s as f64 - c).powi(2);
        }
    }
    for v in &mut scale {
        let sd = (*v / m).sqrt();
        *v = if sd > 1e-12 { sd } else { 1.0 };
    }

    let objective = LogLikelihood::new(dataset, &center, &scale, hyper.l2);
    let mut params = vec![0.0; n + 1];
    let mut epochs = 0;
    let (mut ll, mut grad) = objective.value_and_gradient(&params);
    let mut converged = false;
    loop {
        if !ll.is_finite() || params.iter().any(|p| !p.is_finite()) {
            return Err(ModelError::NonFiniteLoss { epoch: epochs, learning_rate: hyper.learning_rate });
        }
        if max_abs(&grad) < hyper.tolerance {
            converged = true;
            break;
        }
        if epochs == hyper.max_epochs {
            break;
        }
        for (p, g) in params.iter_mut().zip(&grad) {
            *p += hyper.learning_rate * g;
        }
        epochs += 1;
        (ll, grad) = objective.value_and_gradient(&params);
    }

    let beta0 = params[0];
    Ok(TrainedLr {
        beta0,
        beta: params[1..].to_vec(),
        feature_center: center,
        feature_scale: scale,
        diagnostics: LrDiagnostics { epochs, max_abs_gradient: max_abs(&grad), log_likelihood: ll, converged },
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, g| acc.max(g.abs()))
}

impl TrainedLr {
    /// A model with the given coefficients on raw (unstandardized) scales.
    pub fn from_coefficients(beta0: f64, beta: Vec<f64>) -> Self {
        let n = beta.len();
        Self {
            beta0,
            beta,
            feature_center: vec![0.0; n],
            feature_scale: vec![1.0; n],
            diagnostics: LrDiagnostics { epochs: 0, max_abs_gradient: 0.0, log_likelihood: 0.0, converged: true },
        }
    }

    pub fn n_causes(&self) -> usize {
        self.beta.len()
    }

    /// The linear score `beta0 + sum(beta_i * standardized(f_i))`.
    pub fn score(&self, scales: &[u8]) -> f64 {
        self.beta0
            + scales
                .iter()
                .zip(&self.beta)
                .zip(self.feature_center.iter().zip(&self.feature_scale))
                .map(|((&s, b), (c, sc))| b * (s as f64 - c) / sc)
                .sum::<f64>()
    }

    pub(crate) fn validate(&self) -> Result<(), ModelError> {
        let n = self.beta.len();
        if n == 0 || self.feature_center.len() != n || self.feature_scale.len() != n {
            return Err(ModelError::InvalidModel("coefficient and scaling vectors differ in length".into()));
        }
        if !self.feature_scale.iter().all(|s| *s > 0.0 && s.is_finite()) {
            return Err(ModelError::InvalidModel("feature scales must be positive".into()));
        }
        if !self.beta0.is_finite() || !self.beta.iter().chain(&self.feature_center).all(|v| v.is_finite()) {
            return Err(ModelError::InvalidModel("non-finite coefficient".into()));
        }
        Ok(())
    }
}

pub fn lr_predict(model: &TrainedLr, scales: &[u8]) -> Result<f64, ModelError> {
    check_scales(scales, model.n_causes())?;
    Ok(logistic(model.score(scales)))
}

impl SuccessPredictor for TrainedLr {
    fn n_causes(&self) -> usize {
        self.beta.len()
    }
    fn predict(&self, scales: &[u8]) -> Result<f64, ModelError> {
        lr_predict(self, scales)
    }
}
