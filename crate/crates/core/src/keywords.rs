//! Keyword extraction by backtracking a trained TextCNN regressor.
//!
//! Each pooled feature contributes `activation * output_weight` to the
//! log-space prediction. The max-pool position of its filter points at the
//! n-gram that produced the activation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::PAD;
use crate::models::{CnnModel, ModelError};

/// Contributions kept per message before aggregation.
pub const PER_MESSAGE_TOP: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramContribution {
    /// Non-padding tokens of the window, space-separated.
    pub ngram: String,
    /// Window size of the originating filter.
    pub n: usize,
    pub position: usize,
    /// Pooled feature index.
    pub feature: usize,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    /// One entry per filter whose max-pool window holds a real token.
    pub entries: Vec<NgramContribution>,
    /// Summed contribution of filters that pooled an all-padding window.
    pub padding_contribution: f64,
    pub bias: f64,
    /// Log-space prediction; equals the sum of all contributions, the
    /// padding contribution and the bias.
    pub prediction: f64,
}

/// Backtrack every pooled feature of `seq` to its n-gram.
pub fn attribute(model: &CnnModel, seq: &[u32]) -> Result<Attribution, ModelError> {
    if !model.trained {
        return Err(ModelError::UntrainedModel);
    }
    let net = &model.net;
    if let Some(&w) = net.windows.iter().max() {
        if seq.len() < w {
            return Err(ModelError::SequenceTooShort {
                len: seq.len(),
                window: w,
            });
        }
    }
    let trace = net.forward(seq);
    let weights = net.output_weights();
    let mut entries = Vec::with_capacity(trace.pooled.len());
    let mut padding_contribution = 0.0;
    for (feature, &h) in trace.pooled.iter().enumerate() {
        let (wi, _) = net.feature_origin(feature);
        let n = net.windows[wi];
        let position = trace.argmax[feature];
        let contribution = h * weights[feature];
        let window = &seq[position..position + n];
        if window.iter().all(|&t| t == PAD) {
            padding_contribution += contribution;
            continue;
        }
        let ngram = window
            .iter()
            .filter(|&&t| t != PAD)
            .map(|&t| model.vocab.token(t))
            .collect::<Vec<_>>()
            .join(" ");
        entries.push(NgramContribution {
            ngram,
            n,
            position,
            feature,
            contribution,
        });
    }
    Ok(Attribution {
        entries,
        padding_contribution,
        bias: net.output_bias()[0],
        prediction: trace.output[0],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    LowEffort,
    HighEffort,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::LowEffort => "low effort",
            Direction::HighEffort => "high effort",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordEntry {
    pub ngram: String,
    pub n: usize,
    /// Summed absolute contribution across the corpus.
    pub score: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordReport {
    pub direction: Direction,
    pub target: String,
    pub entries: Vec<KeywordEntry>,
}

impl KeywordReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} keywords for {}", self.direction, self.target);
        let width = self
            .entries
            .iter()
            .map(|e| e.ngram.chars().count())
            .max()
            .unwrap_or(0)
            .max(5);
        let _ = writeln!(
            out,
            "{:>4}  {:<width$}  {:>1}  {:>12}  {:>6}",
            "rank", "ngram", "n", "score", "count"
        );
        for (i, e) in self.entries.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>4}  {:<width$}  {:>1}  {:>12.6}  {:>6}",
                i + 1,
                e.ngram,
                e.n,
                e.score,
                e.count
            );
        }
        out
    }
}

/// Top-`k` n-grams pushing predictions down (`LowEffort`) or up
/// (`HighEffort`). Each message contributes its [`PER_MESSAGE_TOP`] most
/// extreme contributions of the requested sign.
pub fn aggregate_keywords<S: AsRef<str> + Sync>(
    model: &CnnModel,
    corpus: &[S],
    direction: Direction,
    k: usize,
    target: &str,
) -> Result<KeywordReport, ModelError> {
    if corpus.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    if !model.trained {
        return Err(ModelError::UntrainedModel);
    }
    let per_message: Vec<Vec<NgramContribution>> = corpus
        .par_iter()
        .map(|m| {
            let mut entries = attribute(model, &model.encode(m.as_ref()))?.entries;
            entries.retain(|e| match direction {
                Direction::HighEffort => e.contribution > 0.0,
                Direction::LowEffort => e.contribution < 0.0,
            });
            entries.sort_by(|a, b| {
                let ord = a.contribution.total_cmp(&b.contribution);
                let ord = if direction == Direction::HighEffort {
                    ord.reverse()
                } else {
                    ord
                };
                ord.then_with(|| a.feature.cmp(&b.feature))
            });
            entries.truncate(PER_MESSAGE_TOP);
            Ok(entries)
        })
        .collect::<Result<_, ModelError>>()?;

    let mut totals: BTreeMap<(String, usize), (f64, usize)> = BTreeMap::new();
    for entries in per_message {
        for e in entries {
            let slot = totals.entry((e.ngram, e.n)).or_default();
            slot.0 += e.contribution.abs();
            slot.1 += 1;
        }
    }
    let mut entries: Vec<KeywordEntry> = totals
        .into_iter()
        .map(|((ngram, n), (score, count))| KeywordEntry {
            ngram,
            n,
            score,
            count,
        })
        .collect();
    entries.sort_by(|a, b| match b.score.total_cmp(&a.score) {
        Ordering::Equal => (&a.ngram, a.n).cmp(&(&b.ngram, b.n)),
        ord => ord,
    });
    entries.truncate(k);
    Ok(KeywordReport {
        direction,
        target: target.to_string(),
        entries,
    })
}
