//! Train every selected approach on every selected target, then score them
//! on the held-out split.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatasetRecord, Target};
use crate::features::{invert_target, transform_target, FeatureError, TfidfVectorizer};
use crate::keywords::{aggregate_keywords, Direction, KeywordReport};
use crate::models::{
    baseline_fit, forest_fit, ridge_fit, rmse, split_indices, textcnn_fit, Approach, CnnHyper,
    EffortModel, ForestParams, ModelError, SplitIndices, SplitRatios,
};
use crate::report::{EvaluationReport, REPORT_SCHEMA_VERSION};
use crate::stats::scott_knott_esd;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub seed: u64,
    pub split: SplitRatios,
    pub approaches: Vec<Approach>,
    pub targets: Vec<Target>,
    pub cnn: CnnHyper,
    pub forest: ForestParams,
    pub ridge_lambda: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            split: SplitRatios::default(),
            approaches: Approach::ALL.to_vec(),
            targets: Target::ALL.to_vec(),
            cnn: CnnHyper::default(),
            forest: ForestParams::default(),
            ridge_lambda: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.approaches.is_empty() || self.targets.is_empty() {
            return Err(PipelineError::Config(
                "select at least one model and one target".into(),
            ));
        }
        if !(self.ridge_lambda >= 0.0 && self.ridge_lambda.is_finite()) {
            return Err(PipelineError::Config("ridge lambda must be >= 0".into()));
        }
        self.cnn
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// Seed for one (target, approach) job, derived from the run seed.
    pub fn job_seed(&self, target: Target, approach: Approach) -> u64 {
        let job = (target as u64) << 8 | approach as u64;
        splitmix(self.seed ^ splitmix(job))
    }
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("models were trained on {expected} records, dataset has {found}")]
    DatasetMismatch { expected: usize, found: usize },
    #[error("no {approach} model for target {target}")]
    MissingModel { target: Target, approach: Approach },
    #[error("{approach} on {target}: {source}")]
    Model {
        target: Target,
        approach: Approach,
        source: ModelError,
    },
    #[error(transparent)]
    Split(ModelError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub target: Target,
    pub approach: Approach,
    pub model: EffortModel,
}

/// Everything needed to re-create the split and score the models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub config: TrainConfig,
    pub n_records: usize,
    pub models: Vec<TrainedModel>,
}

impl ModelBundle {
    pub fn get(&self, target: Target, approach: Approach) -> Option<&EffortModel> {
        self.models
            .iter()
            .find(|m| m.target == target && m.approach == approach)
            .map(|m| &m.model)
    }
}

fn log_targets(records: &[&DatasetRecord], target: Target) -> Result<Vec<f64>, FeatureError> {
    records
        .iter()
        .map(|r| transform_target(r.target(target)))
        .collect()
}

fn split_of(
    records: &[DatasetRecord],
    config: &TrainConfig,
) -> Result<SplitIndices, PipelineError> {
    if records.is_empty() {
        return Err(PipelineError::EmptyDataset);
    }
    split_indices(records.len(), config.seed, config.split).map_err(PipelineError::Split)
}

pub fn train(
    records: &[DatasetRecord],
    config: &TrainConfig,
) -> Result<ModelBundle, PipelineError> {
    config.validate()?;
    let split = split_of(records, config)?;
    let train: Vec<&DatasetRecord> = split.train.iter().map(|&i| &records[i]).collect();
    let validation: Vec<&DatasetRecord> = split.validation.iter().map(|&i| &records[i]).collect();
    let train_msgs: Vec<&str> = train.iter().map(|r| r.message.as_str()).collect();
    let val_msgs: Vec<&str> = validation.iter().map(|r| r.message.as_str()).collect();

    let needs_tfidf = config
        .approaches
        .iter()
        .any(|a| matches!(a, Approach::Ridge | Approach::Forest));
    let tfidf = if needs_tfidf {
        Some(TfidfVectorizer::fit(&train_msgs)?)
    } else {
        None
    };
    let x_train = tfidf.as_ref().map(|v| v.transform_all(&train_msgs));

    let mut targets_log = BTreeMap::new();
    for &t in &config.targets {
        targets_log.insert(t, (log_targets(&train, t)?, log_targets(&validation, t)?));
    }

    let jobs: Vec<(Target, Approach)> = config
        .targets
        .iter()
        .flat_map(|&t| config.approaches.iter().map(move |&a| (t, a)))
        .collect();
    let models = jobs
        .par_iter()
        .map(|&(target, approach)| {
            let (y, y_val) = &targets_log[&target];
            let seed = config.job_seed(target, approach);
            let fail = |source| PipelineError::Model {
                target,
                approach,
                source,
            };
            log::info!("training {approach} for {target}");
            let model = match approach {
                Approach::Ridge => EffortModel::Ridge {
                    tfidf: tfidf.clone().expect("fitted"),
                    model: ridge_fit(x_train.as_ref().expect("fitted"), y, config.ridge_lambda)
                        .map_err(fail)?,
                },
                Approach::Forest => {
                    let params = ForestParams {
                        seed,
                        ..config.forest.clone()
                    };
                    EffortModel::Forest {
                        tfidf: tfidf.clone().expect("fitted"),
                        model: forest_fit(x_train.as_ref().expect("fitted"), y, &params)
                            .map_err(fail)?,
                    }
                }
                Approach::Textcnn => {
                    let hyper = CnnHyper {
                        seed,
                        ..config.cnn.clone()
                    };
                    let val =
                        (!val_msgs.is_empty()).then_some((val_msgs.as_slice(), y_val.as_slice()));
                    EffortModel::Textcnn(textcnn_fit(&train_msgs, y, val, &hyper).map_err(fail)?)
                }
                Approach::Baseline => EffortModel::Baseline(baseline_fit(y).map_err(fail)?),
            };
            Ok(TrainedModel {
                target,
                approach,
                model,
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;

    Ok(ModelBundle {
        config: config.clone(),
        n_records: records.len(),
        models,
    })
}

/// Score a bundle on the test split of `records` (which must be the
/// dataset it was trained on).
pub fn evaluate(
    records: &[DatasetRecord],
    bundle: &ModelBundle,
) -> Result<EvaluationReport, PipelineError> {
    let config = &bundle.config;
    if records.len() != bundle.n_records {
        return Err(PipelineError::DatasetMismatch {
            expected: bundle.n_records,
            found: records.len(),
        });
    }
    let split = split_of(records, config)?;
    let test: Vec<&DatasetRecord> = split.test.iter().map(|&i| &records[i]).collect();
    let msgs: Vec<&str> = test.iter().map(|r| r.message.as_str()).collect();

    let mut report = EvaluationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        seed: config.seed,
        split: config.split,
        n: test.len(),
        n_train: split.train.len(),
        n_validation: split.validation.len(),
        approaches: config
            .approaches
            .iter()
            .map(|a| a.name().to_string())
            .collect(),
        targets: config
            .targets
            .iter()
            .map(|t| t.name().to_string())
            .collect(),
        rmse: BTreeMap::new(),
        average_rmse: BTreeMap::new(),
        ranks: BTreeMap::new(),
        test_ids: test
            .iter()
            .map(|r| format!("{}@{}", r.repo_id, r.sha))
            .collect(),
        actual: BTreeMap::new(),
        predicted: BTreeMap::new(),
    };

    for &target in &config.targets {
        let actual: Vec<f64> = test.iter().map(|r| r.target(target)).collect();
        let mut errors: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for &approach in &config.approaches {
            let model = bundle
                .get(target, approach)
                .ok_or(PipelineError::MissingModel { target, approach })?;
            let fail = |source| PipelineError::Model {
                target,
                approach,
                source,
            };
            // The baseline draws with a seed distinct from its training job.
            let seed = config.job_seed(target, approach) ^ 0x5EED;
            let predicted: Vec<f64> = model
                .predict_log(&msgs, seed)
                .map_err(fail)?
                .into_iter()
                .map(invert_target)
                .collect();
            let score = rmse(&predicted, &actual).map_err(fail)?;
            errors.insert(
                approach.name().to_string(),
                predicted
                    .iter()
                    .zip(&actual)
                    .map(|(p, a)| (p - a).abs())
                    .collect(),
            );
            report
                .rmse
                .entry(approach.name().to_string())
                .or_default()
                .insert(target.name().to_string(), score);
            report
                .predicted
                .entry(approach.name().to_string())
                .or_default()
                .insert(target.name().to_string(), predicted);
        }
        let ranks = scott_knott_esd(&errors).expect("non-empty error groups");
        for (approach, rank) in ranks {
            report
                .ranks
                .entry(approach)
                .or_default()
                .insert(target.name().to_string(), rank);
        }
        report.actual.insert(target.name().to_string(), actual);
    }
    for (approach, per_target) in &report.rmse {
        let avg = per_target.values().sum::<f64>() / per_target.len() as f64;
        report.average_rmse.insert(approach.clone(), avg);
    }
    Ok(report)
}

/// Keyword reports for one target from the bundle's TextCNN model.
pub fn keywords<S: AsRef<str> + Sync>(
    bundle: &ModelBundle,
    messages: &[S],
    target: Target,
    k: usize,
) -> Result<[KeywordReport; 2], PipelineError> {
    let fail = |source| PipelineError::Model {
        target,
        approach: Approach::Textcnn,
        source,
    };
    let Some(EffortModel::Textcnn(model)) = bundle.get(target, Approach::Textcnn) else {
        return Err(PipelineError::MissingModel {
            target,
            approach: Approach::Textcnn,
        });
    };
    let low = aggregate_keywords(model, messages, Direction::LowEffort, k, target.name())
        .map_err(fail)?;
    let high = aggregate_keywords(model, messages, Direction::HighEffort, k, target.name())
        .map_err(fail)?;
    Ok([low, high])
}
