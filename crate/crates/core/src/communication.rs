//! Collaboration proxies: line ownership per file and commit interaction
//! frequency (alternating authors on a file within a time window).

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::format::fixed;
use crate::identity::{normalize_email, IdentityMap, RawIdentity};
use crate::ingest::{ChangeKind, CommitRecord, FileDelta, RepoHistory};

/// Who a commit counts for: its canonical id, or `None` for bot commits.
/// Signatures unknown to the map fall back to the lowercased email.
pub fn author_of(identities: &IdentityMap, commit: &CommitRecord) -> Option<String> {
    let raw = RawIdentity::of(commit);
    match identities.resolve(&raw) {
        Some(i) => Some(i.canonical_id.clone()),
        None if identities.is_removed(&raw) => None,
        None => Some(normalize_email(&commit.author_email)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileOwnership {
    pub path: String,
    pub line_share_by_author: BTreeMap<String, f64>,
    pub line_count_by_author: BTreeMap<String, u64>,
    pub top_contributor: String,
    pub top_share_pct: f64,
}

/// Applies zero-context hunks to a file's line owners.
fn apply_hunks(lines: &mut Vec<Option<String>>, delta: &FileDelta, owner: &Option<String>) {
    let mut hunks = delta.hunks.clone();
    hunks.sort_by_key(|h| std::cmp::Reverse(h.old_start));
    for h in hunks {
        let at = if h.old_lines == 0 {
            h.old_start as usize
        } else {
            h.old_start as usize - 1
        };
        let at = at.min(lines.len());
        let end = (at + h.old_lines as usize).min(lines.len());
        lines.splice(at..end, std::iter::repeat_n(owner.clone(), h.new_lines as usize));
    }
}

/// Replays every commit's first-parent diff and attributes each surviving
/// line to the commit that last wrote it. Files whose lines all belong to
/// excluded (bot) authors, binaries and empty files are omitted.
pub fn contributor_experience(history: &RepoHistory, identities: &IdentityMap) -> Vec<FileOwnership> {
    contributor_experience_with(history, |c| author_of(identities, c))
}

pub fn contributor_experience_with(
    history: &RepoHistory,
    author: impl Fn(&CommitRecord) -> Option<String>,
) -> Vec<FileOwnership> {
    let mut files: BTreeMap<String, Vec<Option<String>>> = BTreeMap::new();
    let mut binary: BTreeSet<String> = BTreeSet::new();
    for commit in history.replay_order() {
        let owner = author(commit);
        for delta in history.attribution_deltas(commit) {
            let mut lines = match (&delta.old_path, delta.kind) {
                (_, ChangeKind::Added) => Vec::new(),
                (Some(old), _) => {
                    binary.remove(old);
                    files.remove(old).unwrap_or_default()
                }
                (None, _) => files.remove(&delta.path).unwrap_or_default(),
            };
            if delta.kind == ChangeKind::Deleted {
                binary.remove(&delta.path);
                continue;
            }
            if delta.binary {
                binary.insert(delta.path.clone());
                lines.clear();
            } else {
                binary.remove(&delta.path);
                apply_hunks(&mut lines, delta, &owner);
            }
            files.insert(delta.path.clone(), lines);
        }
    }

    let mut out = Vec::new();
    for (path, lines) in files {
        if binary.contains(&path) {
            continue;
        }
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for a in lines.into_iter().flatten() {
            *counts.entry(a).or_default() += 1;
        }
        let total: u64 = counts.values().sum();
        if total == 0 {
            continue;
        }
        let (top, top_n) = counts
            .iter()
            .fold((String::new(), 0u64), |(best, n), (a, &c)| if c > n { (a.clone(), c) } else { (best, n) });
        out.push(FileOwnership {
            line_share_by_author: counts.iter().map(|(a, &c)| (a.clone(), c as f64 / total as f64)).collect(),
            line_count_by_author: counts,
            top_contributor: top,
            top_share_pct: 100.0 * top_n as f64 / total as f64,
            path,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CommunicationEvent {
    pub path: String,
    pub author_a: String,
    pub author_b: String,
    pub earlier_commit: String,
    pub later_commit: String,
    pub gap_hours: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CifOptions {
    /// Inclusive upper bound on the gap between paired commits.
    pub window_hours: f64,
    /// Only count B in an A-B-A pattern, both gaps inside the window.
    pub strict_alternation: bool,
}

impl Default for CifOptions {
    fn default() -> Self {
        Self {
            window_hours: 24.0,
            strict_alternation: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CifResult {
    /// Sorted by path, then commit order.
    pub events: Vec<CommunicationEvent>,
    pub per_file: BTreeMap<String, usize>,
}

impl CifResult {
    pub fn total(&self) -> usize {
        self.events.len()
    }
}

struct Touch<'a> {
    id: &'a str,
    author: String,
    secs: i64,
}

fn gap_hours(a: &Touch, b: &Touch) -> f64 {
    (b.secs - a.secs) as f64 / 3600.0
}

/// Scans each file's commits in history order. Merge and bot commits do not
/// participate.
pub fn commit_interaction_frequency(
    history: &RepoHistory,
    identities: &IdentityMap,
    opts: CifOptions,
) -> CifResult {
    commit_interaction_frequency_with(history, |c| author_of(identities, c), opts)
}

pub fn commit_interaction_frequency_with(
    history: &RepoHistory,
    author: impl Fn(&CommitRecord) -> Option<String>,
    opts: CifOptions,
) -> CifResult {
    let mut touches: BTreeMap<&str, Vec<Touch>> = BTreeMap::new();
    for c in history.commits.iter().filter(|c| !c.is_merge) {
        let Some(a) = author(c) else { continue };
        let mut seen = BTreeSet::new();
        for f in &c.files {
            if seen.insert(f.path.as_str()) {
                touches.entry(f.path.as_str()).or_default().push(Touch {
                    id: &c.commit_id,
                    author: a.clone(),
                    secs: c.timestamp.timestamp(),
                });
            }
        }
    }

    let mut result = CifResult::default();
    for (path, ts) in touches {
        let mut n = 0;
        for k in 1..ts.len() {
            let (prev, cur) = (&ts[k - 1], &ts[k]);
            let gap = gap_hours(prev, cur);
            if prev.author == cur.author || gap > opts.window_hours {
                continue;
            }
            if opts.strict_alternation {
                let ok = k >= 2 && {
                    let before = &ts[k - 2];
                    before.author == cur.author && gap_hours(before, prev) <= opts.window_hours
                };
                if !ok {
                    continue;
                }
            }
            let (a, b) = if prev.author < cur.author {
                (&prev.author, &cur.author)
            } else {
                (&cur.author, &prev.author)
            };
            result.events.push(CommunicationEvent {
                path: path.to_string(),
                author_a: a.clone(),
                author_b: b.clone(),
                earlier_commit: prev.id.to_string(),
                later_commit: cur.id.to_string(),
                gap_hours: gap,
            });
            n += 1;
        }
        if n > 0 {
            result.per_file.insert(path.to_string(), n);
        }
    }
    result
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCount {
    pub author_a: String,
    pub author_b: String,
    pub events: usize,
}

/// Event counts per unordered pair, most frequent first.
pub fn pair_summary(events: &[CommunicationEvent]) -> Vec<PairCount> {
    let mut counts: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for e in events {
        let key = if e.author_a <= e.author_b {
            (e.author_a.as_str(), e.author_b.as_str())
        } else {
            (e.author_b.as_str(), e.author_a.as_str())
        };
        *counts.entry(key).or_default() += 1;
    }
    let mut out: Vec<PairCount> = counts
        .into_iter()
        .map(|((a, b), n)| PairCount {
            author_a: a.to_string(),
            author_b: b.to_string(),
            events: n,
        })
        .collect();
    out.sort_by(|x, y| {
        y.events
            .cmp(&x.events)
            .then_with(|| (&x.author_a, &x.author_b).cmp(&(&y.author_a, &y.author_b)))
    });
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeDiffStats {
    pub mean_gap_hours: f64,
    /// 24 one-hour buckets; the last one also holds gaps of exactly 24h.
    pub histogram: Vec<usize>,
}

pub fn time_diff_stats(events: &[CommunicationEvent]) -> Option<TimeDiffStats> {
    if events.is_empty() {
        return None;
    }
    let mut histogram = vec![0; 24];
    let mut sum = 0.0;
    for e in events {
        sum += e.gap_hours;
        let b = (e.gap_hours.max(0.0).floor() as usize).min(23);
        histogram[b] += 1;
    }
    Some(TimeDiffStats {
        mean_gap_hours: sum / events.len() as f64,
        histogram,
    })
}

/// For each author, the mean over files they touched of the number of
/// events on that file they took part in.
pub fn participation(
    history: &RepoHistory,
    events: &[CommunicationEvent],
    author: impl Fn(&CommitRecord) -> Option<String>,
) -> BTreeMap<String, f64> {
    let mut touched: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    for c in history.commits.iter().filter(|c| !c.is_merge) {
        if let Some(a) = author(c) {
            touched.entry(a).or_default().extend(c.files.iter().map(|f| f.path.as_str()));
        }
    }
    let mut involvement: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for e in events {
        *involvement.entry((e.author_a.as_str(), e.path.as_str())).or_default() += 1;
        *involvement.entry((e.author_b.as_str(), e.path.as_str())).or_default() += 1;
    }
    touched
        .iter()
        .filter(|(_, files)| !files.is_empty())
        .map(|(a, files)| {
            let total: usize = files
                .iter()
                .map(|f| involvement.get(&(a.as_str(), *f)).copied().unwrap_or(0))
                .sum();
            (a.clone(), total as f64 / files.len() as f64)
        })
        .collect()
}

pub const EVENTS_HEADER: [&str; 6] = ["path", "author_a", "author_b", "earlier_commit", "later_commit", "gap_hours"];

pub fn write_events_csv<W: Write>(out: W, project_events: &[(&str, &[CommunicationEvent])]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let multi = project_events.len() > 1;
    if multi {
        let mut h = vec!["project"];
        h.extend(EVENTS_HEADER);
        w.write_record(h)?;
    } else {
        w.write_record(EVENTS_HEADER)?;
    }
    for (project, events) in project_events {
        for e in *events {
            let mut rec = Vec::with_capacity(7);
            if multi {
                rec.push(project.to_string());
            }
            rec.extend([
                e.path.clone(),
                e.author_a.clone(),
                e.author_b.clone(),
                e.earlier_commit.clone(),
                e.later_commit.clone(),
                fixed(e.gap_hours),
            ]);
            w.write_record(rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_ownership_csv<W: Write>(out: W, project_files: &[(&str, &[FileOwnership])]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let multi = project_files.len() > 1;
    if multi {
        w.write_record(["project", "path", "top_contributor", "top_share_pct"])?;
    } else {
        w.write_record(["path", "top_contributor", "top_share_pct"])?;
    }
    for (project, files) in project_files {
        for f in *files {
            let mut rec = Vec::with_capacity(4);
            if multi {
                rec.push(project.to_string());
            }
            rec.extend([f.path.clone(), f.top_contributor.clone(), fixed(f.top_share_pct)]);
            w.write_record(rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_histogram_csv<W: Write>(out: W, histogram: &[usize]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bucket_start_hour", "count"])?;
    for (i, n) in histogram.iter().enumerate() {
        w.write_record([i.to_string(), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Hunk;
    use chrono::{TimeZone, Utc};

    fn delta(path: &str, kind: ChangeKind, hunks: Vec<Hunk>) -> FileDelta {
        let added = hunks.iter().map(|h| u64::from(h.new_lines)).sum();
        let removed = hunks.iter().map(|h| u64::from(h.old_lines)).sum();
        FileDelta {
            path: path.into(),
            old_path: None,
            kind,
            binary: false,
            lines_added: added,
            lines_removed: removed,
            method_complexities: vec![],
            hunks,
        }
    }

    fn hunk(old_start: u32, old_lines: u32, new_start: u32, new_lines: u32) -> Hunk {
        Hunk {
            old_start,
            old_lines,
            new_start,
            new_lines,
        }
    }

    fn commit(seq: usize, author: &str, minutes: i64, files: Vec<FileDelta>) -> CommitRecord {
        CommitRecord {
            commit_id: format!("c{seq:03}"),
            author_name: author.into(),
            author_email: format!("{author}@x.org"),
            timestamp: Utc.timestamp_opt(1_700_000_000 + minutes * 60, 0).unwrap(),
            message: String::new(),
            files,
            is_merge: false,
            sequence: seq,
        }
    }

    fn by_name(c: &CommitRecord) -> Option<String> {
        Some(c.author_name.clone())
    }

    #[test]
    fn ownership_three_to_one() {
        let h = RepoHistory::new(
            "p",
            vec![
                commit(0, "a", 0, vec![delta("f", ChangeKind::Added, vec![hunk(0, 0, 1, 4)])]),
                commit(1, "b", 10, vec![delta("f", ChangeKind::Modified, vec![hunk(2, 1, 2, 1)])]),
            ],
        );
        let own = contributor_experience_with(&h, by_name);
        assert_eq!(own.len(), 1);
        assert_eq!(own[0].top_contributor, "a");
        assert_eq!(own[0].top_share_pct, 75.0);
    }

    #[test]
    fn insert_delete_and_file_removal() {
        let h = RepoHistory::new(
            "p",
            vec![
                commit(0, "a", 0, vec![delta("f", ChangeKind::Added, vec![hunk(0, 0, 1, 3)]), delta("g", ChangeKind::Added, vec![hunk(0, 0, 1, 1)])]),
                // b inserts two lines after line 3, deletes line 1
                commit(1, "b", 1, vec![delta("f", ChangeKind::Modified, vec![hunk(1, 1, 0, 0), hunk(3, 0, 3, 2)])]),
                commit(2, "b", 2, vec![delta("g", ChangeKind::Deleted, vec![hunk(1, 1, 0, 0)])]),
            ],
        );
        let own = contributor_experience_with(&h, by_name);
        assert_eq!(own.len(), 1);
        assert_eq!(own[0].line_count_by_author["a"], 2);
        assert_eq!(own[0].line_count_by_author["b"], 2);
        assert_eq!(own[0].top_contributor, "a");
        assert_eq!(own[0].top_share_pct, 50.0);
    }

    fn touch(seq: usize, author: &str, minutes: i64) -> CommitRecord {
        commit(seq, author, minutes, vec![delta("f", ChangeKind::Modified, vec![])])
    }

    #[test]
    fn cif_examples() {
        let h = RepoHistory::new("p", vec![touch(0, "a", 0), touch(1, "b", 60)]);
        let r = commit_interaction_frequency_with(&h, by_name, CifOptions::default());
        assert_eq!(r.total(), 1);
        assert_eq!(r.events[0].gap_hours, 1.0);
        let h = RepoHistory::new("p", vec![touch(0, "a", 0), touch(1, "a", 60)]);
        assert_eq!(commit_interaction_frequency_with(&h, by_name, CifOptions::default()).total(), 0);
        let h = RepoHistory::new("p", vec![touch(0, "a", 0), touch(1, "b", 25 * 60)]);
        assert_eq!(commit_interaction_frequency_with(&h, by_name, CifOptions::default()).total(), 0);
        let h = RepoHistory::new("p", vec![touch(0, "b", 0), touch(1, "a", 24 * 60)]);
        let r = commit_interaction_frequency_with(&h, by_name, CifOptions::default());
        assert_eq!(r.events[0].author_a, "a");
        assert_eq!(r.events[0].gap_hours, 24.0);
    }

    #[test]
    fn strict_alternation_needs_return() {
        let h = RepoHistory::new("p", vec![touch(0, "a", 0), touch(1, "b", 60), touch(2, "a", 120), touch(3, "c", 180)]);
        let strict = CifOptions {
            strict_alternation: true,
            ..CifOptions::default()
        };
        let r = commit_interaction_frequency_with(&h, by_name, strict);
        assert_eq!(r.total(), 1);
        assert_eq!(r.events[0].later_commit, "c002");
        assert_eq!(commit_interaction_frequency_with(&h, by_name, CifOptions::default()).total(), 3);
    }

    fn ev(a: &str, b: &str, gap: f64) -> CommunicationEvent {
        CommunicationEvent {
            path: "f".into(),
            author_a: a.into(),
            author_b: b.into(),
            earlier_commit: "x".into(),
            later_commit: "y".into(),
            gap_hours: gap,
        }
    }

    #[test]
    fn pairs_and_timing() {
        let events = vec![ev("A", "B", 2.0), ev("A", "C", 4.0), ev("A", "B", 3.0)];
        let p = pair_summary(&events);
        assert_eq!((p[0].author_b.as_str(), p[0].events), ("B", 2));
        assert_eq!((p[1].author_b.as_str(), p[1].events), ("C", 1));
        assert!(pair_summary(&[]).is_empty());
        let s = time_diff_stats(&events[..2]).unwrap();
        assert_eq!(s.mean_gap_hours, 3.0);
        let s = time_diff_stats(&vec![ev("A", "B", 24.0); 3]).unwrap();
        assert_eq!(s.mean_gap_hours, 24.0);
        assert_eq!(s.histogram[23], 3);
        assert!(time_diff_stats(&[]).is_none());
    }

    #[test]
    fn participation_means_over_touched_files() {
        let h = RepoHistory::new("p", vec![touch(0, "a", 0), touch(1, "b", 60)]);
        let r = commit_interaction_frequency_with(&h, by_name, CifOptions::default());
        let p = participation(&h, &r.events, by_name);
        assert_eq!(p["a"], 1.0);
        assert_eq!(p["b"], 1.0);
    }
}
