use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::FeatureError;

pub const PAD: u32 = 0;
pub const UNK: u32 = 1;
const PAD_TOKEN: &str = "<pad>";
const UNK_TOKEN: &str = "<unk>";

/// Token index for the CNN embedding table. Index 0 pads, index 1 stands
/// for tokens below the frequency cutoff or unseen at build time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "StoredVocabulary", into = "StoredVocabulary")]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    min_freq: usize,
}

#[derive(Serialize, Deserialize)]
struct StoredVocabulary {
    tokens: Vec<String>,
    min_freq: usize,
}

impl From<StoredVocabulary> for Vocabulary {
    fn from(v: StoredVocabulary) -> Self {
        Self::from_tokens(v.tokens, v.min_freq)
    }
}

impl From<Vocabulary> for StoredVocabulary {
    fn from(v: Vocabulary) -> Self {
        Self {
            tokens: v.tokens,
            min_freq: v.min_freq,
        }
    }
}

impl Vocabulary {
    /// Tokens with at least `min_freq` occurrences, most frequent first,
    /// ties broken alphabetically.
    pub fn build<I, D>(docs: I, min_freq: usize) -> Self
    where
        I: IntoIterator<Item = D>,
        D: AsRef<[String]>,
    {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for doc in docs {
            for tok in doc.as_ref() {
                *counts.entry(tok.clone()).or_default() += 1;
            }
        }
        let mut kept: Vec<(String, usize)> = counts
            .into_iter()
            .filter(|(_, c)| *c >= min_freq.max(1))
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

        let mut tokens = vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()];
        tokens.extend(kept.into_iter().map(|(t, _)| t));
        Self::from_tokens(tokens, min_freq)
    }

    fn from_tokens(tokens: Vec<String>, min_freq: usize) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Self {
            tokens,
            index,
            min_freq,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        // Reserved entries are always present.
        false
    }

    pub fn min_freq(&self) -> usize {
        self.min_freq
    }

    pub fn index(&self, token: &str) -> u32 {
        self.index.get(token).copied().unwrap_or(UNK)
    }

    pub fn token(&self, index: u32) -> &str {
        self.tokens
            .get(index as usize)
            .map(String::as_str)
            .unwrap_or(UNK_TOKEN)
    }

    /// `token<TAB>index`, one entry per line, in index order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, tok) in self.tokens.iter().enumerate() {
            let _ = writeln!(out, "{tok}\t{i}");
        }
        out
    }

    pub fn from_tsv(text: &str, min_freq: usize) -> Result<Self, FeatureError> {
        let mut entries: Vec<(u32, String)> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let malformed = || FeatureError::MalformedVocabulary {
                line: n + 1,
                text: line.to_string(),
            };
            let (tok, idx) = line.rsplit_once('\t').ok_or_else(malformed)?;
            let idx: u32 = idx.parse().map_err(|_| malformed())?;
            entries.push((idx, tok.to_string()));
        }
        entries.sort();
        let dense = entries
            .iter()
            .enumerate()
            .all(|(i, (idx, _))| *idx as usize == i);
        let reserved = entries.len() >= 2 && entries[0].1 == PAD_TOKEN && entries[1].1 == UNK_TOKEN;
        if !dense || !reserved {
            return Err(FeatureError::MalformedVocabulary {
                line: 0,
                text: "indices must be dense with <pad>=0 and <unk>=1".into(),
            });
        }
        Ok(Self::from_tokens(
            entries.into_iter().map(|(_, t)| t).collect(),
            min_freq,
        ))
    }
}
