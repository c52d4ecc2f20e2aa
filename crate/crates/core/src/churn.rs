//! Line- and file-level churn of a single commit.

use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::miner::{CommitRecord, FileStatus};

/// Lines and files touched by one commit.
///
/// `lt` and `ft` are stored alongside the counts so dataset rows carry the
/// totals used in comparison tables; [`EffortVector::new`] keeps them in sync.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EffortVector {
    pub la: u64,
    pub ld: u64,
    pub fa: u64,
    pub fd: u64,
    pub fm: u64,
    pub lt: u64,
    pub ft: u64,
}

impl EffortVector {
    pub fn new(la: u64, ld: u64, fa: u64, fd: u64, fm: u64) -> Self {
        Self {
            la,
            ld,
            fa,
            fd,
            fm,
            lt: la + ld,
            ft: fa + fd + fm,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.lt == self.la + self.ld && self.ft == self.fa + self.fd + self.fm
    }
}

impl Add for EffortVector {
    type Output = EffortVector;

    fn add(self, rhs: Self) -> Self {
        EffortVector::new(
            self.la + rhs.la,
            self.ld + rhs.ld,
            self.fa + rhs.fa,
            self.fd + rhs.fd,
            self.fm + rhs.fm,
        )
    }
}

impl std::iter::Sum for EffortVector {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(EffortVector::default(), Add::add)
    }
}

/// Renamed files count as modified; binary files only count at file level
/// because the miner records no lines for them.
pub fn compute_churn(record: &CommitRecord) -> EffortVector {
    record
        .files
        .iter()
        .map(|file| {
            let (fa, fd, fm) = match file.status {
                FileStatus::Added => (1, 0, 0),
                FileStatus::Deleted => (0, 1, 0),
                FileStatus::Modified | FileStatus::Renamed => (0, 0, 1),
            };
            EffortVector::new(
                file.added_lines.len() as u64,
                file.deleted_lines.len() as u64,
                fa,
                fd,
                fm,
            )
        })
        .sum()
}
