//! Mining, measuring and predicting the repayment effort of self-admitted
//! technical debt in commit histories.
//!
//! The pipeline: [`miner`] walks a git repository, [`churn`] and
//! [`significance`] measure each commit, [`satd`] labels its message,
//! [`models`] learn to predict effort from text and [`keywords`] explains
//! the TextCNN's predictions.

pub mod churn;
pub mod dataset;
pub mod features;
pub mod keywords;
pub mod miner;
pub mod models;
pub mod pipeline;
pub mod report;
pub mod satd;
pub mod significance;
pub mod stats;
pub mod synth;
pub mod tables;

pub use churn::{compute_churn, EffortVector};
pub use dataset::{read_dataset, write_dataset, DatasetError, DatasetRecord, Target};
pub use features::{
    invert_target, tokenize, transform_target, FeatureError, TfidfVectorizer, Vocabulary,
};
pub use keywords::{aggregate_keywords, attribute, Direction, KeywordReport};
pub use miner::{
    keep_commit, walk_repository, CommitRecord, FileDiff, FileStatus, MinerError, MinerOptions,
};
pub use models::{Approach, CnnHyper, EffortModel, ModelError, SplitRatios};
pub use pipeline::{evaluate, train, ModelBundle, PipelineError, TrainConfig};
pub use report::{EvaluationReport, TableFormat};
pub use satd::{rule_detect, DebtType, PatternSet, SatdLabel};
pub use significance::{profile_commit, SignificanceProfile};
pub use stats::{cliffs_delta, descriptive, mann_whitney, scott_knott_esd, GroupSummary};
