//! Self-admitted technical debt labels for commit messages.
//!
//! [`rule_detect`] matches editable per-type phrase lists; the trainable
//! alternative lives in [`classifier`].

mod classifier;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use classifier::{model_detect, train_satd_classifier, SatdClass, SatdModel};

use crate::features::tokenize;

/// Bundled pattern lists, in `type<TAB>pattern` format.
pub const BUNDLED_PATTERNS: &str = include_str!("../../data/satd_patterns.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DebtType {
    CodeDesign,
    Requirement,
    Documentation,
    Test,
}

impl DebtType {
    pub const ALL: [DebtType; 4] = [
        DebtType::CodeDesign,
        DebtType::Requirement,
        DebtType::Documentation,
        DebtType::Test,
    ];

    /// Rule priority: lower wins.
    fn priority(self) -> u8 {
        match self {
            DebtType::Test => 0,
            DebtType::Documentation => 1,
            DebtType::Requirement => 2,
            DebtType::CodeDesign => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DebtType::CodeDesign => "code_design",
            DebtType::Requirement => "requirement",
            DebtType::Documentation => "documentation",
            DebtType::Test => "test",
        }
    }
}

impl fmt::Display for DebtType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DebtType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .trim()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "codedesign" | "design" | "code" => Ok(DebtType::CodeDesign),
            "requirement" => Ok(DebtType::Requirement),
            "documentation" => Ok(DebtType::Documentation),
            "test" => Ok(DebtType::Test),
            _ => Err(format!("unknown debt type {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    Rule,
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SatdLabel {
    pub is_satd: bool,
    pub debt_type: Option<DebtType>,
    pub source: LabelSource,
}

impl SatdLabel {
    pub fn satd(debt_type: DebtType, source: LabelSource) -> Self {
        Self {
            is_satd: true,
            debt_type: Some(debt_type),
            source,
        }
    }

    pub fn not_satd(source: LabelSource) -> Self {
        Self {
            is_satd: false,
            debt_type: None,
            source,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.is_satd == self.debt_type.is_some()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PatternError {
    #[error("pattern line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Pattern {
    /// Token sequence; a trailing `*` on a token makes it a prefix match.
    tokens: Vec<String>,
}

impl Pattern {
    fn matches_at(&self, msg: &[String], at: usize) -> bool {
        if at + self.tokens.len() > msg.len() {
            return false;
        }
        self.tokens
            .iter()
            .zip(&msg[at..])
            .all(|(p, t)| match p.strip_suffix('*') {
                Some(prefix) => t.starts_with(prefix),
                None => p == t,
            })
    }

    fn matches(&self, msg: &[String]) -> bool {
        (0..msg.len()).any(|i| self.matches_at(msg, i))
    }
}

/// Phrase lists per debt type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    /// Sorted by rule priority.
    lists: Vec<(DebtType, Vec<Pattern>)>,
}

impl PatternSet {
    pub fn bundled() -> &'static PatternSet {
        static SET: OnceLock<PatternSet> = OnceLock::new();
        SET.get_or_init(|| PatternSet::parse(BUNDLED_PATTERNS).expect("bundled patterns parse"))
    }

    /// `type<TAB>pattern` per line; blank lines and `#` comments ignored.
    pub fn parse(text: &str) -> Result<Self, PatternError> {
        let mut lists: Vec<(DebtType, Vec<Pattern>)> =
            DebtType::ALL.iter().map(|t| (*t, Vec::new())).collect();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let malformed = |message: String| PatternError::Malformed {
                line: n + 1,
                message,
            };
            let (ty, pat) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected type<TAB>pattern".into()))?;
            let ty: DebtType = ty.parse().map_err(malformed)?;
            let tokens: Vec<String> = pat
                .split_whitespace()
                .map(|w| {
                    let star = w.ends_with('*');
                    let mut tok = tokenize(w.trim_end_matches('*')).join("");
                    if star {
                        tok.push('*');
                    }
                    tok
                })
                .filter(|t| !t.is_empty() && t != "*")
                .collect();
            if tokens.is_empty() {
                return Err(malformed("empty pattern".into()));
            }
            lists
                .iter_mut()
                .find(|(t, _)| *t == ty)
                .expect("all types present")
                .1
                .push(Pattern { tokens });
        }
        lists.sort_by_key(|(t, _)| t.priority());
        Ok(Self { lists })
    }

    pub fn len(&self) -> usize {
        self.lists.iter().map(|(_, p)| p.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn detect(&self, message: &str) -> SatdLabel {
        let tokens = tokenize(message);
        for (ty, patterns) in &self.lists {
            if patterns.iter().any(|p| p.matches(&tokens)) {
                return SatdLabel::satd(*ty, LabelSource::Rule);
            }
        }
        SatdLabel::not_satd(LabelSource::Rule)
    }
}

/// Label a message with the bundled pattern lists.
pub fn rule_detect(message: &str) -> SatdLabel {
    PatternSet::bundled().detect(message)
}
