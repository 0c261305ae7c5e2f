//! Commit history ingestion: first-parent traversal of a local clone with
//! per-file line deltas, bug-fix tagging and a per-method complexity sample.

mod bugfix;
mod complexity;
mod export;
mod walk;

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bugfix::{detect_bug_fix, BugFixMatcher, DEFAULT_BUG_KEYWORDS};
pub use complexity::{detect_methods, estimate_complexity, Language, MethodSpan};
pub use export::{write_commits_csv, COMMITS_HEADER};
pub use walk::walk_history;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: not a git repository")]
    NotARepository { path: String },
    #[error("{path}: repository has no commits")]
    EmptyRepository { path: String },
    #[error("{path}: unreadable object: {detail}")]
    UnreadableObject { path: String, detail: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestOptions {
    /// Defaults to the clone's directory name.
    pub project_name: Option<String>,
    /// Give merge commits their first-parent diff in `files`.
    pub include_merges: bool,
    /// Pair deleted and added files into renames.
    pub follow_renames: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            project_name: None,
            include_merges: false,
            follow_renames: false,
        }
    }
}

/// One zero-context hunk of a unified diff (1-based line numbers as in
/// `@@ -old_start,old_lines +new_start,new_lines @@`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk {
    pub old_start: u32,
    pub old_lines: u32,
    pub new_start: u32,
    pub new_lines: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeKind {
    Added,
    Modified,
    Deleted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDelta {
    pub path: String,
    /// Previous path when rename following paired this delta.
    pub old_path: Option<String>,
    pub kind: ChangeKind,
    pub binary: bool,
    pub lines_added: u64,
    pub lines_removed: u64,
    pub method_complexities: Vec<u32>,
    pub hunks: Vec<Hunk>,
}

impl FileDelta {
    pub fn churn(&self) -> u64 {
        self.lines_added + self.lines_removed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub commit_id: String,
    pub author_name: String,
    pub author_email: String,
    #[serde(with = "crate::time::iso")]
    pub timestamp: DateTime<Utc>,
    pub message: String,
    pub files: Vec<FileDelta>,
    pub is_merge: bool,
    /// Position along the first-parent chain, root = 0.
    pub sequence: usize,
}

impl CommitRecord {
    pub fn churn(&self) -> u64 {
        churn_of(self)
    }

    /// Mean method complexity over all files, when any method was measured.
    pub fn avg_method_complexity(&self) -> Option<f64> {
        let samples: Vec<u32> = self
            .files
            .iter()
            .flat_map(|f| f.method_complexities.iter().copied())
            .collect();
        (!samples.is_empty())
            .then(|| samples.iter().map(|&c| f64::from(c)).sum::<f64>() / samples.len() as f64)
    }
}

/// Σ over files of lines added plus lines removed.
pub fn churn_of(record: &CommitRecord) -> u64 {
    record.files.iter().map(FileDelta::churn).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepoHistory {
    pub project_name: String,
    /// Ascending by timestamp, ties by commit id.
    pub commits: Vec<CommitRecord>,
    #[serde(with = "crate::time::iso")]
    pub first_commit_at: DateTime<Utc>,
    #[serde(with = "crate::time::iso")]
    pub last_commit_at: DateTime<Utc>,
    /// First-parent diffs of merge commits whose `files` were left empty;
    /// only line attribution replays these.
    pub merge_files: BTreeMap<String, Vec<FileDelta>>,
}

impl RepoHistory {
    /// Sorts `commits` into history order. Panics on an empty list.
    pub fn new(project_name: impl Into<String>, mut commits: Vec<CommitRecord>) -> Self {
        assert!(!commits.is_empty(), "history needs at least one commit");
        commits.sort_by(|a, b| {
            a.timestamp
                .cmp(&b.timestamp)
                .then_with(|| a.commit_id.cmp(&b.commit_id))
        });
        let first_commit_at = commits.first().map(|c| c.timestamp).unwrap_or_default();
        let last_commit_at = commits.last().map(|c| c.timestamp).unwrap_or_default();
        Self {
            project_name: project_name.into(),
            commits,
            first_commit_at,
            last_commit_at,
            merge_files: BTreeMap::new(),
        }
    }

    pub fn project_age_years(&self) -> f64 {
        let secs = (self.last_commit_at - self.first_commit_at).num_seconds() as f64;
        secs / (365.25 * 86_400.0)
    }

    /// Commits in first-parent replay order (root first).
    pub fn replay_order(&self) -> Vec<&CommitRecord> {
        let mut v: Vec<&CommitRecord> = self.commits.iter().collect();
        v.sort_by_key(|c| c.sequence);
        v
    }

    /// Deltas of a commit as seen by line attribution.
    pub fn attribution_deltas<'a>(&'a self, commit: &'a CommitRecord) -> &'a [FileDelta] {
        if commit.is_merge && commit.files.is_empty() {
            self.merge_files
                .get(&commit.commit_id)
                .map(Vec::as_slice)
                .unwrap_or(&[])
        } else {
            &commit.files
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn delta(a: u64, r: u64) -> FileDelta {
        FileDelta {
            path: "a.rs".into(),
            old_path: None,
            kind: ChangeKind::Modified,
            binary: false,
            lines_added: a,
            lines_removed: r,
            method_complexities: vec![],
            hunks: vec![],
        }
    }

    fn commit(id: &str, secs: i64, files: Vec<FileDelta>) -> CommitRecord {
        CommitRecord {
            commit_id: id.into(),
            author_name: "A".into(),
            author_email: "a@x.com".into(),
            timestamp: Utc.timestamp_opt(secs, 0).unwrap(),
            message: String::new(),
            files,
            is_merge: false,
            sequence: 0,
        }
    }

    #[test]
    fn churn_examples() {
        assert_eq!(churn_of(&commit("a", 0, vec![delta(10, 4)])), 14);
        assert_eq!(churn_of(&commit("a", 0, vec![])), 0);
        assert_eq!(churn_of(&commit("a", 0, vec![delta(3, 0), delta(0, 7)])), 10);
    }

    #[test]
    fn history_orders_by_time_then_id() {
        let h = RepoHistory::new(
            "p",
            vec![commit("c", 20, vec![]), commit("b", 10, vec![]), commit("a", 20, vec![])],
        );
        let ids: Vec<&str> = h.commits.iter().map(|c| c.commit_id.as_str()).collect();
        assert_eq!(ids, ["b", "a", "c"]);
        assert!(h.first_commit_at <= h.last_commit_at);
    }

    #[test]
    fn age_uses_julian_years() {
        let h = RepoHistory::new(
            "p",
            vec![commit("a", 0, vec![]), commit("b", (365.25 * 86_400.0 * 2.0) as i64, vec![])],
        );
        assert!((h.project_age_years() - 2.0).abs() < 1e-12);
    }
}
