use std::io::Write;

use super::{churn_of, BugFixMatcher, RepoHistory};
use crate::format::fixed;
use crate::time::format_iso;

pub const COMMITS_HEADER: [&str; 13] = [
    "project",
    "commit_id",
    "author_name",
    "author_email",
    "timestamp_iso8601",
    "is_merge",
    "message",
    "lines_added",
    "lines_removed",
    "churn",
    "files_touched",
    "avg_method_complexity",
    "is_bug_fix",
];

/// Writes the commits dataset, one row per commit in history order.
pub fn write_commits_csv<W: Write>(
    out: W,
    histories: &[&RepoHistory],
    bug_fix: &BugFixMatcher,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMMITS_HEADER)?;
    for h in histories {
        for c in &h.commits {
            let added: u64 = c.files.iter().map(|f| f.lines_added).sum();
            let removed: u64 = c.files.iter().map(|f| f.lines_removed).sum();
            w.write_record([
                h.project_name.clone(),
                c.commit_id.clone(),
                c.author_name.clone(),
                c.author_email.clone(),
                format_iso(&c.timestamp),
                c.is_merge.to_string(),
                c.message.clone(),
                added.to_string(),
                removed.to_string(),
                churn_of(c).to_string(),
                c.files.len().to_string(),
                c.avg_method_complexity().map(fixed).unwrap_or_default(),
                bug_fix.matches(&c.message).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
