use std::collections::BTreeMap;
use std::path::Path;

use chrono::{TimeZone, Utc};
use git2::{Commit, Delta, DiffFindOptions, DiffOptions, ErrorCode, FileMode, Patch, Repository};

use super::complexity::{detect_methods, Language};
use super::{ChangeKind, CommitRecord, FileDelta, Hunk, IngestError, IngestOptions, RepoHistory};

/// Walks the first-parent chain from HEAD and returns every commit with its
/// per-file line deltas against the first parent.
pub fn walk_history(repo_path: &Path, opts: &IngestOptions) -> Result<RepoHistory, IngestError> {
    let shown = repo_path.display().to_string();
    let unreadable = |e: git2::Error| IngestError::UnreadableObject {
        path: shown.clone(),
        detail: e.message().to_string(),
    };

    let repo = Repository::open(repo_path).map_err(|_| IngestError::NotARepository {
        path: shown.clone(),
    })?;
    let head = match repo.head() {
        Ok(h) => h,
        Err(e) if matches!(e.code(), ErrorCode::UnbornBranch | ErrorCode::NotFound) => {
            return Err(IngestError::EmptyRepository { path: shown })
        }
        Err(e) => return Err(unreadable(e)),
    };
    let tip = head.peel_to_commit().map_err(unreadable)?;

    let mut chain: Vec<Commit<'_>> = Vec::new();
    let mut cursor = Some(tip);
    while let Some(c) = cursor {
        cursor = if c.parent_count() > 0 {
            Some(c.parent(0).map_err(unreadable)?)
        } else {
            None
        };
        chain.push(c);
    }
    chain.reverse();

    let project_name = opts.project_name.clone().unwrap_or_else(|| {
        repo_path
            .canonicalize()
            .ok()
            .and_then(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .unwrap_or_else(|| shown.clone())
    });

    let mut commits = Vec::with_capacity(chain.len());
    let mut merge_files = BTreeMap::new();
    for (sequence, commit) in chain.iter().enumerate() {
        let is_merge = commit.parent_count() > 1;
        let files = commit_deltas(&repo, commit, opts).map_err(unreadable)?;
        let author = commit.author();
        let when = commit.committer().when();
        let timestamp = Utc
            .timestamp_opt(when.seconds(), 0)
            .single()
            .ok_or_else(|| IngestError::UnreadableObject {
                path: shown.clone(),
                detail: format!("commit {} has an invalid timestamp", commit.id()),
            })?;
        let record_files = if is_merge && !opts.include_merges {
            merge_files.insert(commit.id().to_string(), files);
            Vec::new()
        } else {
            files
        };
        commits.push(CommitRecord {
            commit_id: commit.id().to_string(),
            author_name: String::from_utf8_lossy(author.name_bytes()).into_owned(),
            author_email: String::from_utf8_lossy(author.email_bytes()).into_owned(),
            timestamp,
            message: String::from_utf8_lossy(commit.message_bytes()).into_owned(),
            files: record_files,
            is_merge,
            sequence,
        });
    }

    let mut history = RepoHistory::new(project_name, commits);
    history.merge_files = merge_files;
    Ok(history)
}

fn commit_deltas(
    repo: &Repository,
    commit: &Commit<'_>,
    opts: &IngestOptions,
) -> Result<Vec<FileDelta>, git2::Error> {
    let tree = commit.tree()?;
    let parent_tree = if commit.parent_count() > 0 {
        Some(commit.parent(0)?.tree()?)
    } else {
        None
    };
    let mut diff_opts = DiffOptions::new();
    diff_opts.context_lines(0).interhunk_lines(0).ignore_submodules(true);
    let mut diff = repo.diff_tree_to_tree(parent_tree.as_ref(), Some(&tree), Some(&mut diff_opts))?;
    if opts.follow_renames {
        let mut find = DiffFindOptions::new();
        find.renames(true);
        diff.find_similar(Some(&mut find))?;
    }

    let mut out = Vec::new();
    for idx in 0..diff.deltas().len() {
        let Some(patch) = Patch::from_diff(&diff, idx)? else {
            continue;
        };
        let delta = patch.delta();
        if delta.new_file().mode() == FileMode::Commit || delta.old_file().mode() == FileMode::Commit {
            continue;
        }
        let kind = match delta.status() {
            Delta::Added | Delta::Copied => ChangeKind::Added,
            Delta::Deleted => ChangeKind::Deleted,
            Delta::Modified | Delta::Renamed | Delta::Typechange => ChangeKind::Modified,
            _ => continue,
        };
        let path_of = |f: git2::DiffFile<'_>| {
            f.path()
                .map(|p| p.to_string_lossy().replace('\\', "/"))
                .unwrap_or_default()
        };
        let path = if kind == ChangeKind::Deleted {
            path_of(delta.old_file())
        } else {
            path_of(delta.new_file())
        };
        let old_path = (delta.status() == Delta::Renamed).then(|| path_of(delta.old_file()));
        let binary = delta.flags().is_binary();

        let mut hunks = Vec::new();
        let (mut added, mut removed) = (0u64, 0u64);
        if !binary {
            for h in 0..patch.num_hunks() {
                let (hunk, _) = patch.hunk(h)?;
                hunks.push(Hunk {
                    old_start: hunk.old_start(),
                    old_lines: hunk.old_lines(),
                    new_start: hunk.new_start(),
                    new_lines: hunk.new_lines(),
                });
            }
            let (_, a, r) = patch.line_stats()?;
            added = a as u64;
            removed = r as u64;
        }

        let mut method_complexities = Vec::new();
        if !binary && kind != ChangeKind::Deleted {
            if let Some(lang) = Language::from_path(&path) {
                let blob = repo.find_blob(delta.new_file().id())?;
                if let Ok(text) = std::str::from_utf8(blob.content()) {
                    method_complexities = touched_method_complexities(text, lang, &hunks);
                }
            }
        }

        out.push(FileDelta {
            path,
            old_path,
            kind,
            binary,
            lines_added: added,
            lines_removed: removed,
            method_complexities,
            hunks,
        });
    }
    out.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(out)
}

/// Complexities of the methods in the new file version whose span meets a
/// changed line. A pure deletion touches the line it followed.
fn touched_method_complexities(text: &str, lang: Language, hunks: &[Hunk]) -> Vec<u32> {
    let ranges: Vec<(u32, u32)> = hunks
        .iter()
        .map(|h| {
            if h.new_lines == 0 {
                (h.new_start.max(1), h.new_start.max(1))
            } else {
                (h.new_start, h.new_start + h.new_lines - 1)
            }
        })
        .collect();
    detect_methods(text, lang)
        .into_iter()
        .filter(|m| ranges.iter().any(|&(a, b)| m.overlaps(a, b)))
        .map(|m| m.complexity)
        .collect()
}
