//! Significance-level change counts (LCC/MCC/HCC/CCC) for Java changes.
//!
//! Each `.java` file in a commit is parsed before and after the change, the
//! two structures are diffed into [`EditOp`]s, and the ops are counted per
//! [`Significance`] level.

mod diff;
mod parser;

use serde::{Deserialize, Serialize};

pub use diff::{diff_bodies, diff_structures, EditKind, EditOp, Significance};
pub use parser::{
    normalize_statement, parse_structure, FieldDecl, MethodDecl, StatementKind, StatementNode,
    StructureTree, TypeDecl, TypeKind,
};

use crate::miner::{CommitRecord, FileStatus};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignificanceProfile {
    pub lcc: u64,
    pub mcc: u64,
    pub hcc: u64,
    pub ccc: u64,
    pub total: u64,
}

impl SignificanceProfile {
    pub fn new(lcc: u64, mcc: u64, hcc: u64, ccc: u64) -> Self {
        Self {
            lcc,
            mcc,
            hcc,
            ccc,
            total: lcc + mcc + hcc + ccc,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.total == self.lcc + self.mcc + self.hcc + self.ccc
    }
}

impl std::ops::Add for SignificanceProfile {
    type Output = SignificanceProfile;

    fn add(self, rhs: Self) -> Self {
        SignificanceProfile::new(
            self.lcc + rhs.lcc,
            self.mcc + rhs.mcc,
            self.hcc + rhs.hcc,
            self.ccc + rhs.ccc,
        )
    }
}

pub fn classify_significance(ops: &[EditOp]) -> SignificanceProfile {
    let mut counts = [0u64; 4];
    for op in ops {
        counts[op.kind.significance() as usize] += 1;
    }
    SignificanceProfile::new(counts[0], counts[1], counts[2], counts[3])
}

/// Significance profile plus the files skipped because they did not parse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommitSignificance {
    pub profile: SignificanceProfile,
    pub degraded_files: Vec<String>,
}

pub fn profile_commit(record: &CommitRecord) -> SignificanceProfile {
    profile_commit_detailed(record).profile
}

pub fn profile_commit_detailed(record: &CommitRecord) -> CommitSignificance {
    let mut result = CommitSignificance::default();
    for file in record.files.iter().filter(|f| f.is_java()) {
        let old = match (file.status, &file.old_text) {
            (FileStatus::Added, _) | (_, None) => StructureTree::default(),
            (_, Some(text)) => parse_structure(text),
        };
        let new = match (file.status, &file.new_text) {
            (FileStatus::Deleted, _) | (_, None) => StructureTree::default(),
            (_, Some(text)) => parse_structure(text),
        };
        if old.degraded || new.degraded {
            log::warn!(
                "{}: unbalanced braces in {}, skipped",
                record.sha,
                file.path
            );
            result.degraded_files.push(file.path.clone());
            continue;
        }
        let ops = diff_structures(&old, &new);
        result.profile = result.profile + classify_significance(&ops);
    }
    result
}
