use serde::{Deserialize, Serialize};

use super::{check_scales, check_trainable, ModelError, SuccessPredictor};
use crate::dataset::{SurveyDataset, SCALE_LEVELS};

/// Categorical Naive Bayes over the 9 scale values of each cause.
///
/// Index 0 of `prior` and of each `cpt` entry is the failure class, index 1
/// success. `cpt[i][class][v - 1]` is `P(cause i = v | class)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedNbc {
    pub alpha: f64,
    pub prior: [f64; 2],
    pub cpt: Vec<[[f64; SCALE_LEVELS]; 2]>,
}

/// Frequency estimates with additive (Laplace) smoothing `alpha`.
///
/// Priors are the raw class frequencies; conditionals are
/// `(count(v, class) + alpha) / (count(class) + 9 * alpha)`.
pub fn train_nbc(dataset: &SurveyDataset, alpha: f64) -> Result<TrainedNbc, ModelError> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(ModelError::InvalidAlpha(alpha));
    }
    let (failures, successes) = check_trainable(dataset)?;
    let class_total = [failures as f64, successes as f64];
    let rows = dataset.len() as f64;

    let n = dataset.n_causes();
    let mut counts = vec![[[0u32; SCALE_LEVELS]; 2]; n];
    for row in dataset.rows() {
        let c = row.outcome.as_index();
        for (i, &s) in row.scales.iter().enumerate() {
            counts[i][c][(s - 1) as usize] += 1;
        }
    }
    let cpt = counts
        .iter()
        .map(|per_class| {
            std::array::from_fn(|c| {
                let denom = class_total[c] + SCALE_LEVELS as f64 * alpha;
                std::array::from_fn(|v| (per_class[c][v] as f64 + alpha) / denom)
            })
        })
        .collect();

    Ok(TrainedNbc { alpha, prior: [class_total[0] / rows, class_total[1] / rows], cpt })
}

impl TrainedNbc {
    pub fn n_causes(&self) -> usize {
        self.cpt.len()
    }

    pub(crate) fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidModel(msg));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha {}", self.alpha));
        }
        if self.cpt.is_empty() {
            return bad("no causes".into());
        }
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !self.prior.iter().all(|&p| prob(p)) || (self.prior[0] + self.prior[1] - 1.0).abs() > 1e-9 {
            return bad(format!("priors {:?} do not form a distribution", self.prior));
        }
        for (i, per_class) in self.cpt.iter().enumerate() {
            for dist in per_class {
                let sum: f64 = dist.iter().sum();
                if !dist.iter().all(|&p| prob(p)) || (sum - 1.0).abs() > 1e-9 {
                    return bad(format!("conditional table of cause {} does not sum to 1", i + 1));
                }
            }
        }
        Ok(())
    }

    /// Log of `P(class) * prod_i P(f_i | class)` for both classes.
    fn log_joint(&self, scales: &[u8]) -> [f64; 2] {
        std::array::from_fn(|c| {
            self.prior[c].ln()
                + self
                    .cpt
                    .iter()
                    .zip(scales)
                    .map(|(per_class, &s)| per_class[c][(s - 1) as usize].ln())
                    .sum::<f64>()
        })
    }
}

/// Posterior `P(success | scales)`, normalizing over both classes in log space.
///
/// When neither class can produce the profile (possible only with
/// `alpha = 0`), the success prior is returned.
pub fn nbc_predict(model: &TrainedNbc, scales: &[u8]) -> Result<f64, ModelError> {
    check_scales(scales, model.n_causes())?;
    let [l0, l1] = model.log_joint(scales);
    let p = match (l0 == f64::NEG_INFINITY, l1 == f64::NEG_INFINITY) {
        (true, true) => model.prior[1],
        (true, false) => 1.0,
        (false, true) => 0.0,
        // 1 / (1 + exp(l0 - l1)), stable for large differences
        (false, false) => crate::special::logistic(l1 - l0),
    };
    Ok(p)
}

impl SuccessPredictor for TrainedNbc {
    fn n_causes(&self) -> usize {
        self.cpt.len()
    }
    fn predict(&self, scales: &[u8]) -> Result<f64, ModelError> {
        nbc_predict(self, scales)
    }
}
