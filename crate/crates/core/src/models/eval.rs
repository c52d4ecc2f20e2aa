//! RMSE and the seeded train/validation/test split.
//!
//! The split is specified byte-for-byte in SPLIT.md at the repository root
//! so other implementations can reproduce partition membership.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

pub const MIN_SPLIT_RECORDS: usize = 10;

/// `sqrt(mean((actual - predicted)^2))`.
pub fn rmse(predictions: &[f64], actuals: &[f64]) -> Result<f64, ModelError> {
    if predictions.len() != actuals.len() {
        return Err(ModelError::LengthMismatch {
            left: predictions.len(),
            right: actuals.len(),
        });
    }
    if predictions.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let sq: f64 = predictions
        .iter()
        .zip(actuals)
        .map(|(p, a)| (a - p) * (a - p))
        .sum();
    Ok((sq / predictions.len() as f64).sqrt())
}

/// 64-bit linear congruential generator (Knuth's MMIX constants).
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6_364_136_223_846_793_005;
    pub const INCREMENT: u64 = 1_442_695_040_888_963_407;

    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Value in `0..bound` from the high 31 bits of the next state.
    pub fn below(&mut self, bound: u64) -> u64 {
        (self.next_u64() >> 33) % bound
    }
}

/// Integer percentages; must be positive and sum to 100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: u32,
    pub validation: u32,
    pub test: u32,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 80,
            validation: 10,
            test: 10,
        }
    }
}

impl SplitRatios {
    pub fn new(train: u32, validation: u32, test: u32) -> Result<Self, String> {
        if train == 0 || validation == 0 || test == 0 {
            return Err("split ratios must be positive".into());
        }
        if train + validation + test != 100 {
            return Err(format!(
                "split ratios must sum to 100, got {}",
                train + validation + test
            ));
        }
        Ok(Self {
            train,
            validation,
            test,
        })
    }
}

impl FromStr for SplitRatios {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split('/').collect();
        if parts.len() != 3 {
            return Err(format!("expected TRAIN/VALIDATION/TEST, got {s:?}"));
        }
        let nums = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| format!("not a percentage: {p:?}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(nums[0], nums[1], nums[2])
    }
}

impl fmt::Display for SplitRatios {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.train, self.validation, self.test)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// Shuffle `0..n` with Fisher-Yates driven by [`Lcg`], then cut into
/// contiguous train, validation and test blocks. Validation and test get
/// `floor(n * pct / 100)` records; train takes the rest.
pub fn split_indices(n: usize, seed: u64, ratios: SplitRatios) -> Result<SplitIndices, ModelError> {
    if n < MIN_SPLIT_RECORDS {
        return Err(ModelError::TooFewRecords {
            needed: MIN_SPLIT_RECORDS,
            found: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut lcg = Lcg::new(seed);
    for i in (1..n).rev() {
        let j = lcg.below(i as u64 + 1) as usize;
        order.swap(i, j);
    }
    let n_val = n * ratios.validation as usize / 100;
    let n_test = n * ratios.test as usize / 100;
    let n_train = n - n_val - n_test;
    let test = order.split_off(n_train + n_val);
    let validation = order.split_off(n_train);
    Ok(SplitIndices {
        train: order,
        validation,
        test,
    })
}

/// Default 80/10/10 split of the records themselves.
pub fn split_dataset<T: Clone>(
    records: &[T],
    seed: u64,
) -> Result<(Vec<T>, Vec<T>, Vec<T>), ModelError> {
    let idx = split_indices(records.len(), seed, SplitRatios::default())?;
    let pick = |ix: &[usize]| ix.iter().map(|&i| records[i].clone()).collect::<Vec<T>>();
    Ok((pick(&idx.train), pick(&idx.validation), pick(&idx.test)))
}
