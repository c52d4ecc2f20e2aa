//! Commit-history traversal over local git repositories.
//!
//! [`walk_repository`] yields one [`CommitRecord`] per surviving commit on the
//! default branch, oldest first. Merge commits, automatic reverts and
//! messages with non-Latin alphabetic characters are dropped by
//! [`MinerOptions::keeps`] before any diff is computed.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use git2::{Delta, DiffFindOptions, DiffOptions, Oid, Repository, Sort, Tree};
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MinerError {
    #[error("not a git repository: {0}")]
    NotARepository(PathBuf),
    #[error("repository has no commits: {0}")]
    EmptyRepository(PathBuf),
    #[error("branch not found: {0}")]
    BranchNotFound(String),
    #[error("corrupt object {oid}: {message}")]
    CorruptObject { oid: String, message: String },
    #[error(transparent)]
    Git(#[from] git2::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FileStatus {
    Added,
    Modified,
    Deleted,
    Renamed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDiff {
    pub path: String,
    pub status: FileStatus,
    pub added_lines: Vec<String>,
    pub deleted_lines: Vec<String>,
    /// Full text before the change; only kept for `.java` files.
    pub old_text: Option<String>,
    /// Full text after the change; only kept for `.java` files.
    pub new_text: Option<String>,
}

impl FileDiff {
    pub fn is_java(&self) -> bool {
        is_java_path(&self.path)
    }
}

pub fn is_java_path(path: &str) -> bool {
    Path::new(path)
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("java"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub repo_id: String,
    pub sha: String,
    pub parent_count: usize,
    pub timestamp: i64,
    pub message: String,
    pub files: Vec<FileDiff>,
}

#[derive(Debug, Clone, Default)]
pub struct MinerOptions {
    /// Branch to walk; `None` walks whatever HEAD points at.
    pub branch: Option<String>,
    pub max_commits: Option<usize>,
    pub keep_non_english: bool,
    pub keep_reverts: bool,
}

impl MinerOptions {
    /// Filter applied to every commit. Merge commits are always dropped.
    pub fn keeps(&self, record: &CommitRecord) -> bool {
        if record.parent_count >= 2 {
            return false;
        }
        if !self.keep_reverts && is_rollback(&record.message) {
            return false;
        }
        self.keep_non_english || is_english(&record.message)
    }
}

/// Default filter: drops merges, reverts and non-English messages.
pub fn keep_commit(record: &CommitRecord) -> bool {
    MinerOptions::default().keeps(record)
}

fn revert_line() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?im)^\s*this reverts commit [0-9a-f]+").unwrap())
}

/// True for auto-generated revert messages: the first word is "revert" or a
/// line reads "This reverts commit <hex>".
pub fn is_rollback(message: &str) -> bool {
    let first_word: String = message
        .trim_start()
        .chars()
        .take_while(|c| c.is_alphabetic())
        .collect();
    first_word.eq_ignore_ascii_case("revert") || revert_line().is_match(message)
}

/// False iff the message contains an alphabetic code point above U+024F.
pub fn is_english(message: &str) -> bool {
    !message
        .chars()
        .any(|c| c.is_alphabetic() && u32::from(c) > 0x24F)
}

/// Iterator over the filtered commits of one repository.
///
/// Unreadable commits are skipped; their errors are collected in
/// [`RepoWalker::warnings`].
pub struct RepoWalker {
    repo: Repository,
    repo_id: String,
    opts: MinerOptions,
    pending: std::vec::IntoIter<Oid>,
    emitted: usize,
    warnings: Vec<MinerError>,
}

/// Open `repo_path` and prepare a walk of its default (or selected) branch.
pub fn walk_repository(repo_path: &Path, opts: MinerOptions) -> Result<RepoWalker, MinerError> {
    let repo = Repository::open(repo_path)
        .map_err(|_| MinerError::NotARepository(repo_path.to_path_buf()))?;
    let repo_id = repo_id_for(repo_path);
    RepoWalker::new(repo, repo_id, opts, repo_path)
}

fn repo_id_for(path: &Path) -> String {
    let canonical = path.canonicalize().unwrap_or_else(|_| path.to_path_buf());
    canonical
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| canonical.to_string_lossy().into_owned())
}

impl RepoWalker {
    fn new(
        repo: Repository,
        repo_id: String,
        opts: MinerOptions,
        path: &Path,
    ) -> Result<Self, MinerError> {
        let tip = match &opts.branch {
            Some(name) => {
                let branch = repo
                    .find_branch(name, git2::BranchType::Local)
                    .map_err(|_| MinerError::BranchNotFound(name.clone()))?;
                branch
                    .get()
                    .target()
                    .ok_or_else(|| MinerError::BranchNotFound(name.clone()))?
            }
            None => match repo.head() {
                Ok(head) => head
                    .target()
                    .ok_or_else(|| MinerError::EmptyRepository(path.to_path_buf()))?,
                Err(e) if e.code() == git2::ErrorCode::UnbornBranch => {
                    return Err(MinerError::EmptyRepository(path.to_path_buf()))
                }
                Err(e) => return Err(e.into()),
            },
        };

        let mut walk = repo.revwalk()?;
        walk.set_sorting(Sort::TOPOLOGICAL | Sort::REVERSE)?;
        walk.push(tip)?;
        let mut oids = Vec::new();
        let mut warnings = Vec::new();
        for oid in walk {
            match oid {
                Ok(oid) => oids.push(oid),
                Err(e) => warnings.push(MinerError::CorruptObject {
                    oid: String::from("<revwalk>"),
                    message: e.message().to_string(),
                }),
            }
        }

        Ok(Self {
            repo,
            repo_id,
            opts,
            pending: oids.into_iter(),
            emitted: 0,
            warnings,
        })
    }

    pub fn repo_id(&self) -> &str {
        &self.repo_id
    }

    pub fn warnings(&self) -> &[MinerError] {
        &self.warnings
    }
}

impl Iterator for RepoWalker {
    type Item = CommitRecord;

    fn next(&mut self) -> Option<CommitRecord> {
        if self.opts.max_commits.is_some_and(|max| self.emitted >= max) {
            return None;
        }
        for oid in self.pending.by_ref() {
            match load_commit(&self.repo, &self.repo_id, &self.opts, oid) {
                Ok(Some(record)) => {
                    self.emitted += 1;
                    return Some(record);
                }
                Ok(None) => continue,
                Err(e) => {
                    log::warn!("{}: skipping {oid}: {}", self.repo_id, e.message());
                    self.warnings.push(MinerError::CorruptObject {
                        oid: oid.to_string(),
                        message: e.message().to_string(),
                    });
                }
            }
        }
        None
    }
}

fn load_commit(
    repo: &Repository,
    repo_id: &str,
    opts: &MinerOptions,
    oid: Oid,
) -> Result<Option<CommitRecord>, git2::Error> {
    let commit = repo.find_commit(oid)?;
    let message = String::from_utf8_lossy(commit.message_bytes()).into_owned();
    let mut record = CommitRecord {
        repo_id: repo_id.to_string(),
        sha: oid.to_string(),
        parent_count: commit.parent_count(),
        timestamp: commit.time().seconds(),
        message,
        files: Vec::new(),
    };
    // Filter on metadata first so merges never pay for a diff.
    if !opts.keeps(&record) {
        return Ok(None);
    }
    let new_tree = commit.tree()?;
    let old_tree = if commit.parent_count() > 0 {
        Some(commit.parent(0)?.tree()?)
    } else {
        None
    };
    record.files = diff_trees(repo, old_tree.as_ref(), &new_tree)?;
    Ok(Some(record))
}

/// Line-level diff of two trees. Uses minimal diffs so line counts equal
/// those of a longest-common-subsequence alignment.
pub(crate) fn diff_trees(
    repo: &Repository,
    old: Option<&Tree<'_>>,
    new: &Tree<'_>,
) -> Result<Vec<FileDiff>, git2::Error> {
    let mut opts = DiffOptions::new();
    opts.context_lines(0).minimal(true).ignore_submodules(true);
    let mut diff = repo.diff_tree_to_tree(old, Some(new), Some(&mut opts))?;
    let mut find = DiffFindOptions::new();
    find.renames(true);
    diff.find_similar(Some(&mut find))?;

    let mut files = Vec::new();
    for idx in 0..diff.deltas().len() {
        let delta = diff.get_delta(idx).expect("delta index in range");
        let status = match delta.status() {
            Delta::Added | Delta::Copied => FileStatus::Added,
            Delta::Deleted => FileStatus::Deleted,
            Delta::Modified | Delta::Typechange => FileStatus::Modified,
            Delta::Renamed => FileStatus::Renamed,
            _ => continue,
        };
        let path = delta
            .new_file()
            .path()
            .or_else(|| delta.old_file().path())
            .map(|p| p.to_string_lossy().into_owned())
            .unwrap_or_default();

        let mut added_lines = Vec::new();
        let mut deleted_lines = Vec::new();
        let patch = git2::Patch::from_diff(&diff, idx)?;
        let binary = delta.flags().is_binary() || patch.is_none();
        if let (Some(patch), false) = (patch, binary) {
            for hunk in 0..patch.num_hunks() {
                for line in 0..patch.num_lines_in_hunk(hunk)? {
                    let line = patch.line_in_hunk(hunk, line)?;
                    let text = String::from_utf8_lossy(line.content());
                    let text = text.strip_suffix('\n').unwrap_or(&text);
                    let text = text.strip_suffix('\r').unwrap_or(text).to_string();
                    match line.origin() {
                        '+' => added_lines.push(text),
                        '-' => deleted_lines.push(text),
                        _ => {}
                    }
                }
            }
        }

        let (old_text, new_text) = if is_java_path(&path) && !binary {
            let read = |oid: Oid| -> Result<Option<String>, git2::Error> {
                if oid.is_zero() {
                    return Ok(None);
                }
                let blob = repo.find_blob(oid)?;
                Ok(Some(String::from_utf8_lossy(blob.content()).into_owned()))
            };
            let old_text = match status {
                FileStatus::Added => None,
                _ => read(delta.old_file().id())?,
            };
            let new_text = match status {
                FileStatus::Deleted => None,
                _ => read(delta.new_file().id())?,
            };
            (old_text, new_text)
        } else {
            (None, None)
        };

        files.push(FileDiff {
            path,
            status,
            added_lines,
            deleted_lines,
            old_text,
            new_text,
        });
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(parents: usize, message: &str) -> CommitRecord {
        CommitRecord {
            repo_id: "r".into(),
            sha: "0".repeat(40),
            parent_count: parents,
            timestamp: 0,
            message: message.into(),
            files: vec![],
        }
    }

    #[test]
    fn merge_commits_are_dropped() {
        assert!(!keep_commit(&record(2, "Merge branch 'x'")));
    }

    #[test]
    fn reverts_are_dropped() {
        let msg = "Revert \"add cache\"\n\nThis reverts commit abc123def.";
        assert!(!keep_commit(&record(1, msg)));
        assert!(!keep_commit(&record(1, "revert: broken cache")));
        assert!(!keep_commit(&record(
            1,
            "undo cache\n\nThis reverts commit 0123abcd."
        )));
        assert!(keep_commit(&record(1, "Reverted readme wording")));
    }

    #[test]
    fn plain_commit_is_kept() {
        assert!(keep_commit(&record(1, "fix typo")));
        assert!(keep_commit(&record(0, "initial import")));
    }

    #[test]
    fn english_detection() {
        assert!(is_english("fix typo"));
        assert!(!is_english("修复错误"));
        // U+00EF
        assert!(is_english("naïve fix"));
        assert!(is_english("bump to 1.2.3 (#42) -> done!"));
        // U+0250 is the first code point past Latin Extended-B.
        assert!(!is_english("\u{0250}"));
        assert!(is_english("\u{024F}"));
        assert!(!is_english("исправить"));
    }

    #[test]
    fn options_relax_filters() {
        let opts = MinerOptions {
            keep_non_english: true,
            keep_reverts: true,
            ..Default::default()
        };
        assert!(opts.keeps(&record(1, "修复错误")));
        assert!(opts.keeps(&record(1, "Revert \"x\"")));
        assert!(!opts.keeps(&record(2, "merge")));
    }

    #[test]
    fn not_a_repository() {
        let dir = tempfile::tempdir().unwrap();
        match walk_repository(dir.path(), MinerOptions::default()) {
            Err(MinerError::NotARepository(_)) => {}
            other => panic!("unexpected: {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn empty_repository() {
        let dir = tempfile::tempdir().unwrap();
        Repository::init(dir.path()).unwrap();
        assert!(matches!(
            walk_repository(dir.path(), MinerOptions::default()),
            Err(MinerError::EmptyRepository(_))
        ));
    }
}
