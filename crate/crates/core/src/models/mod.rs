//! Effort regressors. Every model predicts in log space (`ln(1 + y)`);
//! callers invert before computing RMSE.

mod baseline;
mod eval;
mod forest;
pub mod persist;
mod ridge;
pub(crate) mod textcnn;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use baseline::{baseline_fit, baseline_predict, BaselineModel};
pub use eval::{
    rmse, split_dataset, split_indices, Lcg, SplitIndices, SplitRatios, MIN_SPLIT_RECORDS,
};
pub use forest::{forest_fit, forest_predict, ForestModel, ForestParams, RegressionTree};
pub use ridge::{ridge_fit, ridge_predict, RidgeModel, DENSE_LIMIT};
pub use textcnn::{
    encode_messages, textcnn_fit, textcnn_fit_sequences, textcnn_predict, CnnHyper, CnnModel,
    ConvNet, Trace, TrainLog,
};

use crate::features::TfidfVectorizer;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("normal equations are singular; use lambda > 0")]
    SingularSystem,
    #[error("sequence of length {len} is shorter than window {window}")]
    SequenceTooShort { len: usize, window: usize },
    #[error("non-finite loss {loss} at epoch {epoch}, batch {batch}")]
    NonFiniteLoss {
        epoch: usize,
        batch: usize,
        loss: f64,
    },
    #[error("need at least {needed} training values, got {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("length mismatch: {left} predictions vs {right} actuals")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("need at least {needed} records to split, got {found}")]
    TooFewRecords { needed: usize, found: usize },
    #[error("model has not been trained")]
    UntrainedModel,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyper(String),
    #[error("corpus has a single class; at least two are required")]
    DegenerateCorpus,
    #[error("model file: {0}")]
    Persist(String),
}

/// Regression approach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    Ridge,
    Forest,
    Textcnn,
    Baseline,
}

impl Approach {
    pub const ALL: [Approach; 4] = [
        Approach::Ridge,
        Approach::Forest,
        Approach::Textcnn,
        Approach::Baseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Approach::Ridge => "ridge",
            Approach::Forest => "forest",
            Approach::Textcnn => "textcnn",
            Approach::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Approach::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                format!("unknown model {s:?} (expected ridge, forest, textcnn or baseline)")
            })
    }
}

/// A fitted model together with whatever text featurizer it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EffortModel {
    Ridge {
        tfidf: TfidfVectorizer,
        model: RidgeModel,
    },
    Forest {
        tfidf: TfidfVectorizer,
        model: ForestModel,
    },
    Textcnn(CnnModel),
    Baseline(BaselineModel),
}

impl EffortModel {
    pub fn approach(&self) -> Approach {
        match self {
            EffortModel::Ridge { .. } => Approach::Ridge,
            EffortModel::Forest { .. } => Approach::Forest,
            EffortModel::Textcnn(_) => Approach::Textcnn,
            EffortModel::Baseline(_) => Approach::Baseline,
        }
    }

    /// Log-space predictions. `seed` only affects the baseline.
    pub fn predict_log<S: AsRef<str>>(
        &self,
        messages: &[S],
        seed: u64,
    ) -> Result<Vec<f64>, ModelError> {
        match self {
            EffortModel::Ridge { tfidf, model } => {
                ridge_predict(model, &tfidf.transform_all(messages))
            }
            EffortModel::Forest { tfidf, model } => {
                forest_predict(model, &tfidf.transform_all(messages))
            }
            EffortModel::Textcnn(model) => {
                if !model.trained {
                    return Err(ModelError::UntrainedModel);
                }
                Ok(textcnn_predict(model, messages))
            }
            EffortModel::Baseline(model) => Ok(baseline_predict(model, messages.len(), seed)),
        }
    }
}
