//! Text and target featurization shared by the regressors.

mod tfidf;
mod vocab;

use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

pub use tfidf::{CsrMatrix, SparseVec, TfidfVectorizer};
pub use vocab::{Vocabulary, PAD, UNK};

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("cannot fit on an empty corpus")]
    EmptyCorpus,
    #[error("target must be non-negative, got {0}")]
    NegativeTarget(f64),
    #[error("malformed vocabulary line {line}: {text:?}")]
    MalformedVocabulary { line: usize, text: String },
}

/// Largest convolution window; every encoded sequence is at least this long.
pub const MIN_SEQUENCE_LEN: usize = 5;

fn token_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // Issue keys such as JCR-2092 stay whole; everything else splits on
    // non-alphanumerics.
    RE.get_or_init(|| Regex::new(r"[a-z]+-[0-9]+|[a-z0-9]+").unwrap())
}

/// Lowercase, split on non-alphanumerics, keep `letters-digits` issue keys.
pub fn tokenize(message: &str) -> Vec<String> {
    let lower = message.to_lowercase();
    token_pattern()
        .find_iter(&lower)
        .map(|m| m.as_str().to_string())
        .collect()
}

/// `ln(1 + y)`.
pub fn transform_target(y: f64) -> Result<f64, FeatureError> {
    if y < 0.0 || y.is_nan() {
        return Err(FeatureError::NegativeTarget(y));
    }
    Ok(y.ln_1p())
}

/// Inverse of [`transform_target`], clamped at zero.
pub fn invert_target(z: f64) -> f64 {
    z.exp_m1().max(0.0)
}

/// Map tokens to indices, truncating to `max_len` and padding with
/// [`PAD`] up to `max(MIN_SEQUENCE_LEN, tokens.len())`.
pub fn encode_sequence(tokens: &[String], vocab: &Vocabulary, max_len: usize) -> Vec<u32> {
    let mut seq: Vec<u32> = tokens
        .iter()
        .take(max_len)
        .map(|t| vocab.index(t))
        .collect();
    let target = seq.len().max(MIN_SEQUENCE_LEN);
    seq.resize(target, PAD);
    seq
}
