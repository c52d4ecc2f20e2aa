use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::ModelError;

/// Random baseline: Normal(mean, std) of the log-space training targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub std: f64,
}

pub fn baseline_fit(y_train: &[f64]) -> Result<BaselineModel, ModelError> {
    if y_train.len() < 2 {
        return Err(ModelError::InsufficientData {
            needed: 2,
            found: y_train.len(),
        });
    }
    let n = y_train.len() as f64;
    let mean = y_train.iter().sum::<f64>() / n;
    let var = y_train.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(BaselineModel {
        mean,
        std: var.sqrt(),
    })
}

/// `n` independent log-space draws.
pub fn baseline_predict(model: &BaselineModel, n: usize, seed: u64) -> Vec<f64> {
    if model.std == 0.0 {
        return vec![model.mean; n];
    }
    let dist = Normal::new(model.mean, model.std).expect("finite std");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}
