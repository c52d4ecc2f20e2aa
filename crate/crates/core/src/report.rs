//! Evaluation report: per-target RMSE in original space, per-approach
//! averages and Scott-Knott ESD ranks. The JSON layout is described by
//! `schemas/evaluation_report.schema.json`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::models::SplitRatios;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub seed: u64,
    pub split: SplitRatios,
    /// Test-set size.
    pub n: usize,
    pub n_train: usize,
    pub n_validation: usize,
    pub approaches: Vec<String>,
    pub targets: Vec<String>,
    /// approach -> target -> RMSE.
    pub rmse: BTreeMap<String, BTreeMap<String, f64>>,
    /// approach -> mean RMSE over targets.
    pub average_rmse: BTreeMap<String, f64>,
    /// approach -> target -> rank (1 = largest errors).
    pub ranks: BTreeMap<String, BTreeMap<String, usize>>,
    /// `repo_id@sha` of each test record, in evaluation order.
    pub test_ids: Vec<String>,
    /// target -> actual values.
    pub actual: BTreeMap<String, Vec<f64>>,
    /// approach -> target -> predicted values.
    pub predicted: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Csv,
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per approach, one column per target, `rmse (rank)` cells.
    pub fn render(&self, format: TableFormat) -> String {
        let mut header = vec!["approach".to_string()];
        header.extend(self.targets.iter().map(|t| t.to_ascii_uppercase()));
        header.push("average".into());
        let mut rows = vec![header];
        for a in &self.approaches {
            let mut row = vec![a.clone()];
            for t in &self.targets {
                let rmse = self
                    .rmse
                    .get(a)
                    .and_then(|m| m.get(t))
                    .copied()
                    .unwrap_or(f64::NAN);
                let rank = self
                    .ranks
                    .get(a)
                    .and_then(|m| m.get(t))
                    .copied()
                    .unwrap_or(0);
                row.push(match format {
                    TableFormat::Text => format!("{rmse:.2} ({rank})"),
                    TableFormat::Csv => format!("{rmse:.6} ({rank})"),
                });
            }
            let avg = self.average_rmse.get(a).copied().unwrap_or(f64::NAN);
            row.push(match format {
                TableFormat::Text => format!("{avg:.2}"),
                TableFormat::Csv => format!("{avg:.6}"),
            });
            rows.push(row);
        }
        match format {
            TableFormat::Text => {
                let mut out = format!("RMSE on {} test records (rank in parentheses)\n", self.n);
                out.push_str(&align(&rows));
                out
            }
            TableFormat::Csv => to_csv(&rows),
        }
    }
}

/// Left-align the first column, right-align the rest.
pub fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            if c == 0 {
                let _ = write!(line, "{cell:<w$}", w = widths[c]);
            } else {
                let _ = write!(line, "{cell:>w$}", w = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn to_csv(rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| {
                if c.contains([',', '"', '\n']) {
                    format!("\"{}\"", c.replace('"', "\"\""))
                } else {
                    c.clone()
                }
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment_and_csv_quoting() {
        let rows = vec![
            vec!["a".to_string(), "1".into()],
            vec!["long name".to_string(), "22".into()],
        ];
        assert_eq!(align(&rows), "a           1\nlong name  22\n");
        let rows = vec![vec!["x,y".to_string(), "say \"hi\"".into()]];
        assert_eq!(to_csv(&rows), "\"x,y\",\"say \"\"hi\"\"\"\n");
    }
}
