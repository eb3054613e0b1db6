use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::classifiers::ModelError;
use crate::cost::CostError;
use crate::dataset::DatasetError;
use crate::ga::GaError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable code for the error category.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dataset(DatasetError::NoRows) => "dataset.no_rows",
            Error::Dataset(
                DatasetError::ScaleOutOfRange { .. } | DatasetError::RowScale { .. } | DatasetError::LevelOutOfRange(_),
            ) => "dataset.range",
            Error::Dataset(DatasetError::TooFewRows(_)) => "dataset.too_few_rows",
            Error::Dataset(_) => "dataset.invalid",
            Error::Cost(CostError::Degenerate(_)) => "cost.degenerate",
            Error::Cost(_) => "cost.invalid",
            Error::Model(ModelError::SingleClass { .. }) => "model.single_class",
            Error::Model(ModelError::EmptyDataset) => "model.empty_dataset",
            Error::Model(ModelError::NonFiniteLoss { .. }) => "model.non_finite",
            Error::Model(_) => "model.invalid",
            Error::Ga(GaError::BudgetExceeded { .. }) => "ga.budget",
            Error::Ga(_) => "ga.invalid",
            Error::Analysis(AnalysisError::CatalogMismatch) => "analysis.catalog_mismatch",
            Error::Analysis(AnalysisError::ZeroVariance { .. }) => "analysis.zero_variance",
            Error::Analysis(_) => "analysis.invalid",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
