use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{tokenize, FeatureError};

/// Sparse row with strictly increasing column indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseVec {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, v)| dense[i as usize] * v)
            .sum()
    }

    pub fn get(&self, col: u32) -> f64 {
        match self.indices.binary_search(&col) {
            Ok(k) => self.values[k],
            Err(_) => 0.0,
        }
    }
}

/// Row-major sparse matrix.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CsrMatrix {
    pub rows: Vec<SparseVec>,
    pub n_cols: usize,
}

impl CsrMatrix {
    pub fn new(rows: Vec<SparseVec>, n_cols: usize) -> Self {
        Self { rows, n_cols }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn from_dense(dense: &[Vec<f64>]) -> Self {
        let n_cols = dense.first().map_or(0, Vec::len);
        let rows = dense
            .iter()
            .map(|row| {
                let (indices, values) = row
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(i, v)| (i as u32, *v))
                    .unzip();
                SparseVec { indices, values }
            })
            .collect();
        Self { rows, n_cols }
    }
}

/// Fitted tf-idf weighting: `tf * (ln((1+N)/(1+df)) + 1)`, rows L2-normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfVectorizer {
    terms: BTreeMap<String, u32>,
    idf: Vec<f64>,
}

impl TfidfVectorizer {
    pub fn fit<S: AsRef<str>>(corpus: &[S]) -> Result<Self, FeatureError> {
        if corpus.is_empty() {
            return Err(FeatureError::EmptyCorpus);
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for doc in corpus {
            let mut seen = tokenize(doc.as_ref());
            seen.sort_unstable();
            seen.dedup();
            for tok in seen {
                *df.entry(tok).or_default() += 1;
            }
        }
        let n = corpus.len() as f64;
        let mut terms = BTreeMap::new();
        let mut idf = Vec::with_capacity(df.len());
        for (i, (term, count)) in df.into_iter().enumerate() {
            terms.insert(term, i as u32);
            idf.push(((1.0 + n) / (1.0 + count as f64)).ln() + 1.0);
        }
        Ok(Self { terms, idf })
    }

    pub fn n_features(&self) -> usize {
        self.idf.len()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.terms.get(term).map(|&i| self.idf[i as usize])
    }

    pub fn term_index(&self, term: &str) -> Option<u32> {
        self.terms.get(term).copied()
    }

    /// Unseen tokens are ignored, so an all-unseen message maps to zero.
    pub fn transform(&self, message: &str) -> SparseVec {
        let mut tf: BTreeMap<u32, f64> = BTreeMap::new();
        for tok in tokenize(message) {
            if let Some(&i) = self.terms.get(&tok) {
                *tf.entry(i).or_default() += 1.0;
            }
        }
        let mut row = SparseVec {
            indices: Vec::with_capacity(tf.len()),
            values: Vec::with_capacity(tf.len()),
        };
        for (i, count) in tf {
            row.indices.push(i);
            row.values.push(count * self.idf[i as usize]);
        }
        let norm = row.norm();
        if norm > 0.0 {
            row.values.iter_mut().for_each(|v| *v /= norm);
        }
        row
    }

    pub fn transform_all<S: AsRef<str>>(&self, corpus: &[S]) -> CsrMatrix {
        CsrMatrix::new(
            corpus.iter().map(|d| self.transform(d.as_ref())).collect(),
            self.n_features(),
        )
    }
}
