//! SATD vs non-SATD and per-debt-type comparison tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetRecord, Target};
use crate::report::{align, to_csv, TableFormat};
use crate::satd::DebtType;
use crate::stats::{
    cliffs_delta, descriptive, mann_whitney, scott_knott_esd, GroupSummary, StatsError,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: String,
    /// One entry per section group; `None` for an empty group.
    pub summaries: Vec<Option<GroupSummary>>,
    /// Scott-Knott ESD rank of each group.
    pub ranks: Vec<Option<usize>>,
    /// Two-group sections only, omitted when a group has fewer than two
    /// values.
    pub p_value: Option<f64>,
    pub cliffs_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub groups: Vec<String>,
    pub sizes: Vec<usize>,
    pub rows: Vec<MetricRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTables {
    pub sections: Vec<Section>,
}

fn section(title: &str, groups: Vec<(String, Vec<&DatasetRecord>)>, pairwise: bool) -> Section {
    let rows = Target::ALL
        .iter()
        .map(|&t| {
            let values: Vec<Vec<f64>> = groups
                .iter()
                .map(|(_, recs)| recs.iter().map(|r| r.target(t)).collect())
                .collect();
            let summaries = values.iter().map(|v| descriptive(v).ok()).collect();
            let present: BTreeMap<String, Vec<f64>> = groups
                .iter()
                .zip(&values)
                .filter(|(_, v)| !v.is_empty())
                .map(|((name, _), v)| (name.clone(), v.clone()))
                .collect();
            let ranks_by_name = if present.is_empty() {
                BTreeMap::new()
            } else {
                scott_knott_esd(&present).expect("non-empty groups")
            };
            let ranks = groups
                .iter()
                .map(|(name, _)| ranks_by_name.get(name).copied())
                .collect();
            let (mut p_value, mut delta) = (None, None);
            if pairwise && values.len() == 2 {
                let (a, b) = (&values[0], &values[1]);
                if !a.is_empty() && !b.is_empty() {
                    delta = cliffs_delta(a, b).ok();
                }
                if a.len() >= 2 && b.len() >= 2 {
                    p_value = mann_whitney(a, b).ok().map(|r| r.p_two_sided);
                }
            }
            MetricRow {
                metric: t.label(),
                summaries,
                ranks,
                p_value,
                cliffs_delta: delta,
            }
        })
        .collect();
    Section {
        title: title.to_string(),
        sizes: groups.iter().map(|(_, r)| r.len()).collect(),
        groups: groups.into_iter().map(|(n, _)| n).collect(),
        rows,
    }
}

pub fn compare_groups(records: &[DatasetRecord]) -> Result<ComparisonTables, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let satd: Vec<&DatasetRecord> = records.iter().filter(|r| r.label.is_satd).collect();
    let non: Vec<&DatasetRecord> = records.iter().filter(|r| !r.label.is_satd).collect();
    let by_type: Vec<(String, Vec<&DatasetRecord>)> = DebtType::ALL
        .iter()
        .map(|&t| {
            (
                t.name().to_string(),
                records
                    .iter()
                    .filter(|r| r.label.debt_type == Some(t))
                    .collect(),
            )
        })
        .collect();
    Ok(ComparisonTables {
        sections: vec![
            section(
                "SATD vs non-SATD",
                vec![("satd".into(), satd), ("non_satd".into(), non)],
                true,
            ),
            section("SATD by debt type", by_type, false),
        ],
    })
}

fn fmt_num(v: f64) -> String {
    format!("{v:.2}")
}

impl ComparisonTables {
    pub fn render(&self, format: TableFormat) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            let pairwise = s
                .rows
                .iter()
                .any(|r| r.cliffs_delta.is_some() || r.p_value.is_some());
            let mut header = vec!["metric".to_string()];
            for g in &s.groups {
                header.push(format!("{g} mean"));
                header.push(format!("{g} median"));
                header.push(format!("{g} trimmed"));
            }
            if pairwise {
                header.push("p".into());
                header.push("delta".into());
            }
            let mut rows = vec![header];
            for r in &s.rows {
                let mut row = vec![r.metric.clone()];
                for (sum, rank) in r.summaries.iter().zip(&r.ranks) {
                    match (sum, rank) {
                        (Some(g), Some(k)) => {
                            row.push(format!("{} ({k})", fmt_num(g.mean)));
                            row.push(fmt_num(g.median));
                            row.push(fmt_num(g.trimmed_mean));
                        }
                        _ => row.extend(["-".to_string(), "-".into(), "-".into()]),
                    }
                }
                if pairwise {
                    row.push(r.p_value.map_or("-".into(), |p| format!("{p:.4}")));
                    row.push(r.cliffs_delta.map_or("-".into(), |d| format!("{d:.3}")));
                }
                rows.push(row);
            }
            match format {
                TableFormat::Text => {
                    if i > 0 {
                        out.push('\n');
                    }
                    let sizes: Vec<String> = s
                        .groups
                        .iter()
                        .zip(&s.sizes)
                        .map(|(g, n)| format!("{g} n={n}"))
                        .collect();
                    out.push_str(&format!("{} ({})\n", s.title, sizes.join(", ")));
                    out.push_str(&align(&rows));
                }
                TableFormat::Csv => {
                    let mut csv_rows = rows;
                    for row in csv_rows.iter_mut() {
                        row.insert(0, s.title.clone());
                    }
                    csv_rows[0][0] = "section".into();
                    if i > 0 {
                        csv_rows.remove(0);
                    }
                    out.push_str(&to_csv(&csv_rows));
                }
            }
        }
        out
    }
}
