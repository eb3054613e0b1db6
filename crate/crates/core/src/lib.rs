//! Cost-aware project success optimization.
//!
//! The pipeline trains a success-probability model (categorical Naive Bayes or
//! logistic regression) on ordinal survey data, then searches the space of
//! per-cause Likert scales with a genetic algorithm for the profile that
//! maximizes `efficacy = P(success) - normalized_cost`. The [`analysis`]
//! module ranks the resulting factor profiles and compares two models with
//! Spearman correlation, Levene's test and a pooled-variance t-test.
//!
//! ```
//! use successopt::classifiers::{train_nbc, SuccessPredictor};
//! use successopt::cost::CostTable;
//! use successopt::dataset::{generate_synthetic, SyntheticDataSpec};
//! use successopt::ga::{run_ga, GaParams};
//!
//! let spec = SyntheticDataSpec::planted_default(200);
//! let data = generate_synthetic(&spec, 7).unwrap();
//! let model = train_nbc(&data, 1.0).unwrap();
//! let params = GaParams { max_iterations: 10, ..GaParams::default() };
//! let result = run_ga(&params, &model, &CostTable::builtin()).unwrap();
//! assert!(result.best.efficacy >= result.initial_best.efficacy);
//! ```

pub mod analysis;
pub mod classifiers;
pub mod cost;
pub mod dataset;
mod error;
pub mod ga;
pub mod pipeline;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
