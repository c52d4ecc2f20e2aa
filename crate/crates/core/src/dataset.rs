//! JSONL dataset: one [`DatasetRecord`] per line, fields in a fixed order.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::churn::{compute_churn, EffortVector};
use crate::miner::CommitRecord;
use crate::satd::{PatternSet, SatdLabel};
use crate::significance::{profile_commit_detailed, SignificanceProfile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub repo_id: String,
    pub sha: String,
    pub timestamp: i64,
    pub message: String,
    pub label: SatdLabel,
    pub effort: EffortVector,
    pub significance: SignificanceProfile,
}

impl DatasetRecord {
    /// Label and measure one mined commit. Java files the parser could not
    /// handle are left out of the significance counts.
    pub fn from_commit(commit: &CommitRecord, patterns: &PatternSet) -> (Self, Vec<String>) {
        let sig = profile_commit_detailed(commit);
        let record = Self {
            repo_id: commit.repo_id.clone(),
            sha: commit.sha.clone(),
            timestamp: commit.timestamp,
            message: commit.message.clone(),
            label: patterns.detect(&commit.message),
            effort: compute_churn(commit),
            significance: sig.profile,
        };
        (record, sig.degraded_files)
    }

    pub fn target(&self, target: Target) -> f64 {
        let e = &self.effort;
        let s = &self.significance;
        (match target {
            Target::La => e.la,
            Target::Ld => e.ld,
            Target::Lt => e.lt,
            Target::Fa => e.fa,
            Target::Fd => e.fd,
            Target::Fm => e.fm,
            Target::Ft => e.ft,
            Target::Lcc => s.lcc,
            Target::Mcc => s.mcc,
            Target::Hcc => s.hcc,
            Target::Ccc => s.ccc,
        }) as f64
    }

    fn validate(&self) -> Result<(), String> {
        let hex = self.sha.len() == 40
            && self
                .sha
                .bytes()
                .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b));
        if !hex {
            return Err(format!("sha {:?} is not 40 lowercase hex digits", self.sha));
        }
        if !self.label.is_consistent() {
            return Err("label: is_satd and debt_type disagree".into());
        }
        if !self.effort.is_consistent() {
            return Err("effort: lt or ft does not match its parts".into());
        }
        if !self.significance.is_consistent() {
            return Err("significance: total does not match its parts".into());
        }
        Ok(())
    }
}

/// The eleven effort targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    La,
    Ld,
    Lt,
    Fa,
    Fd,
    Fm,
    Ft,
    Lcc,
    Mcc,
    Hcc,
    Ccc,
}

impl Target {
    pub const ALL: [Target; 11] = [
        Target::La,
        Target::Ld,
        Target::Lt,
        Target::Fa,
        Target::Fd,
        Target::Fm,
        Target::Ft,
        Target::Lcc,
        Target::Mcc,
        Target::Hcc,
        Target::Ccc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::La => "la",
            Target::Ld => "ld",
            Target::Lt => "lt",
            Target::Fa => "fa",
            Target::Fd => "fd",
            Target::Fm => "fm",
            Target::Ft => "ft",
            Target::Lcc => "lcc",
            Target::Mcc => "mcc",
            Target::Hcc => "hcc",
            Target::Ccc => "ccc",
        }
    }

    /// Upper-case label used in rendered tables.
    pub fn label(self) -> String {
        self.name().to_ascii_uppercase()
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Target::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown target {s:?}"))
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("duplicate record {repo_id}@{sha} on line {line}")]
    Duplicate {
        line: usize,
        repo_id: String,
        sha: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_dataset<W: Write>(mut out: W, records: &[DatasetRecord]) -> Result<(), DatasetError> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Read and validate a dataset. Blank lines are skipped.
pub fn read_dataset<R: BufRead>(input: R) -> Result<Vec<DatasetRecord>, DatasetError> {
    let mut records = Vec::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = i + 1;
        let record: DatasetRecord =
            serde_json::from_str(&line).map_err(|e| DatasetError::Invalid {
                line: n,
                message: e.to_string(),
            })?;
        record
            .validate()
            .map_err(|message| DatasetError::Invalid { line: n, message })?;
        if !seen.insert((record.repo_id.clone(), record.sha.clone())) {
            return Err(DatasetError::Duplicate {
                line: n,
                repo_id: record.repo_id,
                sha: record.sha,
            });
        }
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satd::{DebtType, LabelSource};

    fn record(sha_byte: char) -> DatasetRecord {
        DatasetRecord {
            repo_id: "demo".into(),
            sha: sha_byte.to_string().repeat(40),
            timestamp: 1_700_000_000,
            message: "fix typo \"quoted\" naïve".into(),
            label: SatdLabel::satd(DebtType::Documentation, LabelSource::Rule),
            effort: EffortVector::new(3, 1, 0, 0, 1),
            significance: SignificanceProfile::new(1, 0, 0, 0),
        }
    }

    #[test]
    fn roundtrip_is_exact() {
        let records = vec![record('a'), record('b')];
        let mut buf = Vec::new();
        write_dataset(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with(r#"{"repo_id":"demo","sha":"aaaa"#));
        assert_eq!(read_dataset(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn field_order_is_fixed() {
        let json = serde_json::to_string(&record('c')).unwrap();
        let keys = [
            "repo_id",
            "sha",
            "timestamp",
            "message",
            "label",
            "effort",
            "significance",
        ];
        let positions: Vec<usize> = keys
            .iter()
            .map(|k| json.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        assert!(json.contains(r#""effort":{"la":3,"ld":1,"fa":0,"fd":0,"fm":1,"lt":4,"ft":1}"#));
    }

    #[test]
    fn invalid_records_are_rejected() {
        let mut bad = record('a');
        bad.sha = "ABC".into();
        let line = serde_json::to_string(&bad).unwrap();
        assert!(matches!(
            read_dataset(line.as_bytes()),
            Err(DatasetError::Invalid { line: 1, .. })
        ));

        let mut bad = record('a');
        bad.effort.lt = 99;
        let line = serde_json::to_string(&bad).unwrap();
        assert!(read_dataset(line.as_bytes()).is_err());

        let line = serde_json::to_string(&record('a')).unwrap();
        let twice = format!("{line}\n{line}\n");
        assert!(matches!(
            read_dataset(twice.as_bytes()),
            Err(DatasetError::Duplicate { line: 2, .. })
        ));
        assert!(read_dataset("{not json".as_bytes()).is_err());
    }

    #[test]
    fn targets() {
        let r = record('a');
        assert_eq!(r.target(Target::La), 3.0);
        assert_eq!(r.target(Target::Lt), 4.0);
        assert_eq!(r.target(Target::Lcc), 1.0);
        assert_eq!("LCC".parse::<Target>().unwrap(), Target::Lcc);
        assert!("xx".parse::<Target>().is_err());
        assert_eq!(Target::ALL.len(), 11);
    }
}
