//! Corpus selection filter: a small active team with steady recent work.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use chrono::{DateTime, Datelike, Utc};
use serde::{Deserialize, Serialize};

use crate::communication::author_of;
use crate::identity::{dealias, filter_bots, AliasOverrides, BotPatterns};
use crate::ingest::RepoHistory;

pub const MIN_CONTRIBUTORS: usize = 3;
pub const MAX_CONTRIBUTORS: usize = 10;
pub const TRAILING_MONTHS: u32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub project_name: String,
    pub contributors: usize,
    /// Trailing calendar months, oldest first, as `YYYY-MM`, that have no
    /// commit.
    pub inactive_months: Vec<String>,
    pub selected: bool,
}

fn month_index(t: &DateTime<Utc>) -> i64 {
    t.year() as i64 * 12 + t.month0() as i64
}

fn month_label(i: i64) -> String {
    format!("{:04}-{:02}", i.div_euclid(12), i.rem_euclid(12) + 1)
}

/// Applies the two filters to each history: between 3 and 10 contributors
/// after de-aliasing and bot removal, and at least one non-merge commit in
/// each of the six calendar months ending with the month of `as_of`
/// (default: the repository's latest commit).
pub fn select_projects(
    histories: &[RepoHistory],
    overrides: &AliasOverrides,
    bots: &BotPatterns,
    as_of: Option<DateTime<Utc>>,
) -> Vec<SelectionRow> {
    histories
        .iter()
        .map(|h| {
            let (map, _) = dealias(&h.commits, overrides);
            let (map, _) = filter_bots(map, bots);
            let mut people = BTreeSet::new();
            let mut months: BTreeMap<i64, usize> = BTreeMap::new();
            for c in h.commits.iter().filter(|c| !c.is_merge) {
                if let Some(id) = author_of(&map, c) {
                    people.insert(id);
                    *months.entry(month_index(&c.timestamp)).or_default() += 1;
                }
            }
            let end = month_index(&as_of.unwrap_or(h.last_commit_at));
            let inactive_months: Vec<String> = (end - TRAILING_MONTHS as i64 + 1..=end)
                .filter(|m| !months.contains_key(m))
                .map(month_label)
                .collect();
            let contributors = people.len();
            SelectionRow {
                project_name: h.project_name.clone(),
                contributors,
                selected: (MIN_CONTRIBUTORS..=MAX_CONTRIBUTORS).contains(&contributors) && inactive_months.is_empty(),
                inactive_months,
            }
        })
        .collect()
}

pub fn write_selection_csv<W: Write>(out: W, rows: &[SelectionRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["project", "contributors", "inactive_months", "selected"])?;
    for r in rows {
        w.write_record([
            r.project_name.as_str(),
            &r.contributors.to_string(),
            &r.inactive_months.join(";"),
            if r.selected { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::CommitRecord;
    use chrono::TimeZone;

    fn commit(seq: usize, name: &str, y: i32, m: u32) -> CommitRecord {
        CommitRecord {
            commit_id: format!("{seq:040x}"),
            author_name: name.into(),
            author_email: format!("{}@x.org", name.to_lowercase()),
            timestamp: Utc.with_ymd_and_hms(y, m, 10, 12, 0, 0).unwrap(),
            message: "work".into(),
            files: vec![],
            is_merge: false,
            sequence: seq,
        }
    }

    #[test]
    fn month_labels_wrap_years() {
        let t = Utc.with_ymd_and_hms(2024, 1, 31, 0, 0, 0).unwrap();
        assert_eq!(month_label(month_index(&t) - 1), "2023-12");
    }

    #[test]
    fn steady_small_team_is_selected() {
        let names = ["Ann", "Bob", "Cy"];
        let mut commits = Vec::new();
        for (i, m) in (1..=6).enumerate() {
            commits.push(commit(i, names[i % 3], 2024, m));
        }
        let h = RepoHistory::new("p", commits);
        let rows = select_projects(&[h], &AliasOverrides::default(), &BotPatterns::default(), None);
        assert_eq!(rows[0].contributors, 3);
        assert!(rows[0].inactive_months.is_empty());
        assert!(rows[0].selected);
    }

    #[test]
    fn gap_month_or_small_team_rejects() {
        let commits = vec![
            commit(0, "Ann", 2024, 1),
            commit(1, "Bob", 2024, 2),
            commit(2, "Cy", 2024, 4),
            commit(3, "Ann", 2024, 5),
            commit(4, "Bob", 2024, 6),
        ];
        let h = RepoHistory::new("p", commits);
        let rows = select_projects(&[h.clone()], &AliasOverrides::default(), &BotPatterns::default(), None);
        assert_eq!(rows[0].inactive_months, vec!["2024-03".to_string()]);
        assert!(!rows[0].selected);

        let two = RepoHistory::new("q", vec![commit(0, "Ann", 2024, 1), commit(1, "Bob", 2024, 1)]);
        let as_of = Utc.with_ymd_and_hms(2024, 1, 20, 0, 0, 0).unwrap();
        let rows = select_projects(&[two], &AliasOverrides::default(), &BotPatterns::default(), Some(as_of));
        assert_eq!(rows[0].contributors, 2);
        assert!(!rows[0].selected);
    }
}
