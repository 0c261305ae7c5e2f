#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{TimeZone, Utc};
use spacex_core::fixtures::{Author, Changes, RepoWriter};
use spacex_core::ingest::{ChangeKind, CommitRecord, FileDelta, RepoHistory};
use spacex_testkit::history::PlainCommit;
use spacex_testkit::provenance::Script;

/// Commits an edit script to a fresh repository at `path`.
pub fn write_script(path: &Path, script: &Script) {
    let mut w = RepoWriter::init(path).unwrap();
    for c in &script.commits {
        let (name, email) = &script.authors[c.author];
        let changes: Changes = c
            .files
            .iter()
            .map(|(p, content)| {
                let bytes = content.as_ref().map(|lines| {
                    let mut s = String::new();
                    for l in lines {
                        s.push_str(l);
                        s.push('\n');
                    }
                    s.into_bytes()
                });
                (p.clone(), bytes)
            })
            .collect();
        w.commit(&Author::new(name, email), c.timestamp, &c.message, &changes).unwrap();
    }
    w.finish().unwrap();
}

/// Builds an in-memory history from plain commits; the author string is
/// used as both name and email local part.
pub fn plain_history(commits: &[PlainCommit]) -> RepoHistory {
    let records = commits
        .iter()
        .enumerate()
        .map(|(i, c)| CommitRecord {
            commit_id: c.id.clone(),
            author_name: c.author.clone(),
            author_email: format!("{}@example.com", c.author),
            timestamp: Utc.timestamp_opt(c.timestamp, 0).unwrap(),
            message: "change".into(),
            files: c
                .files
                .iter()
                .map(|p| FileDelta {
                    path: p.clone(),
                    old_path: None,
                    kind: ChangeKind::Modified,
                    binary: false,
                    lines_added: 1,
                    lines_removed: 0,
                    method_complexities: vec![],
                    hunks: vec![],
                })
                .collect(),
            is_merge: false,
            sequence: i,
        })
        .collect();
    RepoHistory::new("plain", records)
}

pub fn by_name(c: &CommitRecord) -> Option<String> {
    Some(c.author_name.clone())
}

pub fn by_email(c: &CommitRecord) -> Option<String> {
    Some(c.author_email.clone())
}

pub type Shares = BTreeMap<String, BTreeMap<String, u64>>;
