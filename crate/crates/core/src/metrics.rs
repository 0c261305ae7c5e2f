//! Per-(author, project) and per-repository metrics.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use spacex_stats::DataColumn;
use thiserror::Error;

use crate::format::{fixed, fixed_opt};
use crate::forge::{CiConclusion, CiRun, ForgeSnapshot, PullRequest};
use crate::identity::{BotPatterns, IdentityMap, RawIdentity};
use crate::ingest::{BugFixMatcher, CommitRecord, RepoHistory};
use crate::sentiment::{negative_commit_percentage, SentimentLabel};
use crate::table::Table;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("{project}: {labels} sentiment labels for {commits} commits")]
    AlignmentError {
        project: String,
        labels: usize,
        commits: usize,
    },
    #[error("{project}: author {name} <{email}> has no identity")]
    UnknownAuthor {
        project: String,
        name: String,
        email: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorProjectRow {
    pub project_name: String,
    pub canonical_id: String,
    pub total_commits: u64,
    pub code_churn: u64,
    pub bug_fix_commits: u64,
    pub avg_complexity_per_method: Option<f64>,
    pub negative_commit_pct: f64,
    pub total_issues: u64,
    pub total_prs: u64,
    pub project_age_years: f64,
    pub mean_commit_gap_hours: Option<f64>,
    pub avg_daily_commits: f64,
    pub avg_daily_churn: f64,
    pub total_code_reviews: Option<u64>,
    pub total_deployments: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepoRow {
    pub project_name: String,
    pub ci_cd_success_rate: Option<f64>,
    pub avg_pr_merge_time_hours: Option<f64>,
    pub total_commits: u64,
}

/// Forge author with no matching commit identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForgeOnlyRow {
    pub project_name: String,
    pub login: String,
    pub total_issues: u64,
    pub total_prs: u64,
}

/// Project-wide issue and PR counts (the project-scoped variant).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectTotals {
    pub project_name: String,
    pub total_issues: u64,
    pub total_prs: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IssueScope {
    #[default]
    Author,
    Project,
}

#[derive(Debug, Clone, Default)]
pub struct MetricsOptions {
    pub include_merges: bool,
    pub bug_fix: BugFixMatcher,
    pub bot_patterns: BotPatterns,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuthorRows {
    pub rows: Vec<AuthorProjectRow>,
    pub forge_only: Vec<ForgeOnlyRow>,
    pub totals: ProjectTotals,
    pub repo: RepoRow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Efficiency {
    pub total_commits: u64,
    pub active_days: u64,
    pub mean_commit_gap_hours: Option<f64>,
    pub avg_daily_commits: f64,
    pub avg_daily_churn: f64,
}

/// Cadence metrics of one author's commits (sorted ascending). Daily rates
/// divide by the number of distinct UTC dates with a commit.
pub fn efficiency_metrics(commits: &[&CommitRecord]) -> Efficiency {
    let total = commits.len() as u64;
    let days: BTreeSet<NaiveDate> = commits.iter().map(|c| c.timestamp.date_naive()).collect();
    let active = days.len().max(1) as u64;
    let gap = (commits.len() >= 2).then(|| {
        let sum: f64 = commits
            .windows(2)
            .map(|w| (w[1].timestamp - w[0].timestamp).num_seconds() as f64 / 3600.0)
            .sum();
        sum / (commits.len() - 1) as f64
    });
    let churn: u64 = commits.iter().map(|c| c.churn()).sum();
    Efficiency {
        total_commits: total,
        active_days: if commits.is_empty() { 0 } else { active },
        mean_commit_gap_hours: gap,
        avg_daily_commits: total as f64 / active as f64,
        avg_daily_churn: churn as f64 / active as f64,
    }
}

/// #success / (#success + #failure); other conclusions are ignored.
pub fn ci_cd_success_rate(runs: &[CiRun]) -> Option<f64> {
    let ok = runs.iter().filter(|r| r.conclusion == CiConclusion::Success).count();
    let bad = runs.iter().filter(|r| r.conclusion == CiConclusion::Failure).count();
    (ok + bad > 0).then(|| ok as f64 / (ok + bad) as f64)
}

/// Mean hours from creation to merge over merged PRs.
pub fn avg_pr_merge_time(prs: &[PullRequest]) -> Option<f64> {
    let hours: Vec<f64> = prs
        .iter()
        .filter_map(|p| p.merged_at.map(|m| (m - p.created_at).num_seconds() as f64 / 3600.0))
        .collect();
    (!hours.is_empty()).then(|| hours.iter().sum::<f64>() / hours.len() as f64)
}

/// Candidate forge logins of an identity: email local parts (with the
/// numeric prefix of noreply addresses stripped) and names without spaces.
fn login_keys(emails: &BTreeSet<String>, names: &BTreeSet<String>) -> BTreeSet<String> {
    let mut keys = BTreeSet::new();
    for e in emails {
        if let Some((local, domain)) = e.rsplit_once('@') {
            keys.insert(local.to_string());
            if domain == "users.noreply.github.com" {
                if let Some((_, login)) = local.split_once('+') {
                    keys.insert(login.to_string());
                }
            }
        }
    }
    for n in names {
        let lower = n.trim().to_lowercase();
        if !lower.is_empty() {
            keys.insert(lower.split_whitespace().collect::<String>());
        }
    }
    keys
}

/// Maps a forge login onto a canonical id, choosing the smallest id when
/// several identities claim the login.
pub fn login_index(identities: &IdentityMap) -> BTreeMap<String, String> {
    let mut index: BTreeMap<String, String> = BTreeMap::new();
    for ident in identities.identities() {
        for key in login_keys(&ident.emails, &ident.names) {
            index
                .entry(key)
                .and_modify(|cur| {
                    if ident.canonical_id < *cur {
                        *cur = ident.canonical_id.clone();
                    }
                })
                .or_insert_with(|| ident.canonical_id.clone());
        }
    }
    index
}

/// Commits that count towards author aggregates.
pub fn counted(commit: &CommitRecord, include_merges: bool) -> bool {
    include_merges || !commit.is_merge
}

/// Aggregates one repository into author rows. `labels` align with
/// `history.commits`.
pub fn build_author_rows(
    history: &RepoHistory,
    snapshot: &ForgeSnapshot,
    labels: &[SentimentLabel],
    identities: &IdentityMap,
    opts: &MetricsOptions,
) -> Result<AuthorRows, MetricsError> {
    let project = &history.project_name;
    if labels.len() != history.commits.len() {
        return Err(MetricsError::AlignmentError {
            project: project.clone(),
            labels: labels.len(),
            commits: history.commits.len(),
        });
    }
    let mut per_author: BTreeMap<String, Vec<(&CommitRecord, SentimentLabel)>> = BTreeMap::new();
    for (c, &label) in history.commits.iter().zip(labels) {
        if !counted(c, opts.include_merges) {
            continue;
        }
        let raw = RawIdentity::of(c);
        match identities.resolve(&raw) {
            Some(ident) => per_author
                .entry(ident.canonical_id.clone())
                .or_default()
                .push((c, label)),
            None if identities.is_removed(&raw) => {}
            None => {
                return Err(MetricsError::UnknownAuthor {
                    project: project.clone(),
                    name: c.author_name.clone(),
                    email: c.author_email.clone(),
                })
            }
        }
    }

    let logins = login_index(identities);
    let mut issues: BTreeMap<String, u64> = BTreeMap::new();
    let mut prs: BTreeMap<String, u64> = BTreeMap::new();
    let mut reviews: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let mut forge_only: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let mut human_issues = 0;
    let mut human_prs = 0;
    let is_bot = |login: &str| opts.bot_patterns.is_bot_signature(login, "");
    for i in &snapshot.issues {
        if is_bot(&i.author_login) {
            continue;
        }
        human_issues += 1;
        match logins.get(&i.author_login.to_lowercase()) {
            Some(id) => *issues.entry(id.clone()).or_default() += 1,
            None => forge_only.entry(i.author_login.clone()).or_default().0 += 1,
        }
    }
    for p in &snapshot.pull_requests {
        if is_bot(&p.author_login) {
            continue;
        }
        human_prs += 1;
        match logins.get(&p.author_login.to_lowercase()) {
            Some(id) => *prs.entry(id.clone()).or_default() += 1,
            None => forge_only.entry(p.author_login.clone()).or_default().1 += 1,
        }
    }
    for (login, extra) in &snapshot.extra_columns {
        if let Some(id) = logins.get(&login.to_lowercase()) {
            let e = reviews.entry(id.clone()).or_default();
            e.0 += extra.total_code_reviews;
            e.1 += extra.total_deployments;
        }
    }

    let age = history.project_age_years();
    let mut rows = Vec::with_capacity(per_author.len());
    let mut repo_commits = 0;
    for (id, commits) in &per_author {
        let records: Vec<&CommitRecord> = commits.iter().map(|(c, _)| *c).collect();
        let labels: Vec<SentimentLabel> = commits.iter().map(|(_, l)| *l).collect();
        let eff = efficiency_metrics(&records);
        let samples: Vec<u32> = records
            .iter()
            .flat_map(|c| c.files.iter().flat_map(|f| f.method_complexities.iter().copied()))
            .collect();
        let extra = reviews.get(id);
        repo_commits += eff.total_commits;
        rows.push(AuthorProjectRow {
            project_name: project.clone(),
            canonical_id: id.clone(),
            total_commits: eff.total_commits,
            code_churn: records.iter().map(|c| c.churn()).sum(),
            bug_fix_commits: records.iter().filter(|c| opts.bug_fix.matches(&c.message)).count() as u64,
            avg_complexity_per_method: (!samples.is_empty())
                .then(|| samples.iter().map(|&s| f64::from(s)).sum::<f64>() / samples.len() as f64),
            negative_commit_pct: negative_commit_percentage(&labels).unwrap_or(0.0),
            total_issues: issues.get(id).copied().unwrap_or(0),
            total_prs: prs.get(id).copied().unwrap_or(0),
            project_age_years: age,
            mean_commit_gap_hours: eff.mean_commit_gap_hours,
            avg_daily_commits: eff.avg_daily_commits,
            avg_daily_churn: eff.avg_daily_churn,
            total_code_reviews: if snapshot.extra_columns.is_empty() { None } else { Some(extra.map_or(0, |e| e.0)) },
            total_deployments: if snapshot.extra_columns.is_empty() { None } else { Some(extra.map_or(0, |e| e.1)) },
        });
    }

    Ok(AuthorRows {
        rows,
        forge_only: forge_only
            .into_iter()
            .map(|(login, (i, p))| ForgeOnlyRow {
                project_name: project.clone(),
                login,
                total_issues: i,
                total_prs: p,
            })
            .collect(),
        totals: ProjectTotals {
            project_name: project.clone(),
            total_issues: human_issues,
            total_prs: human_prs,
        },
        repo: RepoRow {
            project_name: project.clone(),
            ci_cd_success_rate: ci_cd_success_rate(&snapshot.ci_runs),
            avg_pr_merge_time_hours: avg_pr_merge_time(&snapshot.pull_requests),
            total_commits: repo_commits,
        },
    })
}

/// Replaces author-scoped issue/PR counts with project totals.
pub fn apply_project_scope(rows: &mut [AuthorProjectRow], totals: &[ProjectTotals]) {
    for r in rows {
        if let Some(t) = totals.iter().find(|t| t.project_name == r.project_name) {
            r.total_issues = t.total_issues;
            r.total_prs = t.total_prs;
        }
    }
}

pub const AUTHOR_HEADER: [&str; 15] = [
    "project",
    "author",
    "total_commits",
    "code_churn",
    "bug_fix_commits",
    "avg_complexity",
    "negative_commit_pct",
    "total_issues",
    "total_prs",
    "project_age_years",
    "mean_commit_gap_hours",
    "avg_daily_commits",
    "avg_daily_churn",
    "total_code_reviews",
    "total_deployments",
];

pub const REPO_HEADER: [&str; 4] = [
    "project",
    "ci_cd_success_rate",
    "avg_pr_merge_time_hours",
    "total_commits",
];

fn count_opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_author_csv<W: Write>(out: W, rows: &[AuthorProjectRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AUTHOR_HEADER)?;
    for r in rows {
        w.write_record([
            r.project_name.clone(),
            r.canonical_id.clone(),
            r.total_commits.to_string(),
            r.code_churn.to_string(),
            r.bug_fix_commits.to_string(),
            fixed_opt(r.avg_complexity_per_method),
            fixed(r.negative_commit_pct),
            r.total_issues.to_string(),
            r.total_prs.to_string(),
            fixed(r.project_age_years),
            fixed_opt(r.mean_commit_gap_hours),
            fixed(r.avg_daily_commits),
            fixed(r.avg_daily_churn),
            count_opt(r.total_code_reviews),
            count_opt(r.total_deployments),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_repo_csv<W: Write>(out: W, rows: &[RepoRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPO_HEADER)?;
    for r in rows {
        w.write_record([
            r.project_name.clone(),
            fixed_opt(r.ci_cd_success_rate),
            fixed_opt(r.avg_pr_merge_time_hours),
            r.total_commits.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_forge_only_csv<W: Write>(out: W, rows: &[ForgeOnlyRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["project", "login", "total_issues", "total_prs"])?;
    for r in rows {
        w.write_record([
            r.project_name.clone(),
            r.login.clone(),
            r.total_issues.to_string(),
            r.total_prs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_totals_csv<W: Write>(out: W, rows: &[ProjectTotals]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["project", "total_issues", "total_prs"])?;
    for r in rows {
        w.write_record([r.project_name.clone(), r.total_issues.to_string(), r.total_prs.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn counts(rows: &[AuthorProjectRow], f: impl Fn(&AuthorProjectRow) -> u64) -> Vec<f64> {
    rows.iter().map(|r| f(r) as f64).collect()
}

/// The author dataset as a table whose numeric columns carry the CSV names.
pub fn author_table(rows: &[AuthorProjectRow]) -> Table {
    let mut t = Table::new("authors");
    t.labels.push(("project".into(), rows.iter().map(|r| r.project_name.clone()).collect()));
    t.labels.push(("author".into(), rows.iter().map(|r| r.canonical_id.clone()).collect()));
    let c = &mut t.columns;
    c.push(DataColumn::new("total_commits", counts(rows, |r| r.total_commits)));
    c.push(DataColumn::new("code_churn", counts(rows, |r| r.code_churn)));
    c.push(DataColumn::new("bug_fix_commits", counts(rows, |r| r.bug_fix_commits)));
    c.push(DataColumn::with_missing("avg_complexity", rows.iter().map(|r| r.avg_complexity_per_method).collect()));
    c.push(DataColumn::new("negative_commit_pct", rows.iter().map(|r| r.negative_commit_pct).collect()));
    c.push(DataColumn::new("total_issues", counts(rows, |r| r.total_issues)));
    c.push(DataColumn::new("total_prs", counts(rows, |r| r.total_prs)));
    c.push(DataColumn::new("project_age_years", rows.iter().map(|r| r.project_age_years).collect()));
    c.push(DataColumn::with_missing("mean_commit_gap_hours", rows.iter().map(|r| r.mean_commit_gap_hours).collect()));
    c.push(DataColumn::new("avg_daily_commits", rows.iter().map(|r| r.avg_daily_commits).collect()));
    c.push(DataColumn::new("avg_daily_churn", rows.iter().map(|r| r.avg_daily_churn).collect()));
    c.push(DataColumn::with_missing("total_code_reviews", rows.iter().map(|r| r.total_code_reviews.map(|v| v as f64)).collect()));
    c.push(DataColumn::with_missing("total_deployments", rows.iter().map(|r| r.total_deployments.map(|v| v as f64)).collect()));
    t
}

pub fn repo_table(rows: &[RepoRow]) -> Table {
    let mut t = Table::new("repos");
    t.labels.push(("project".into(), rows.iter().map(|r| r.project_name.clone()).collect()));
    t.columns.push(DataColumn::with_missing("ci_cd_success_rate", rows.iter().map(|r| r.ci_cd_success_rate).collect()));
    t.columns.push(DataColumn::with_missing("avg_pr_merge_time_hours", rows.iter().map(|r| r.avg_pr_merge_time_hours).collect()));
    t.columns.push(DataColumn::new("total_commits", rows.iter().map(|r| r.total_commits as f64).collect()));
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{CiConclusion, IssueRecord, IssueState};
    use crate::identity::{dealias, filter_bots, AliasOverrides};
    use crate::ingest::{ChangeKind, FileDelta};
    use chrono::{Duration, TimeZone, Utc};

    fn t0() -> chrono::DateTime<Utc> {
        Utc.with_ymd_and_hms(2024, 3, 4, 9, 0, 0).unwrap()
    }

    fn commit(id: usize, name: &str, email: &str, hours: i64, msg: &str, add: u64) -> CommitRecord {
        CommitRecord {
            commit_id: format!("{id:040x}"),
            author_name: name.into(),
            author_email: email.into(),
            timestamp: t0() + Duration::hours(hours),
            message: msg.into(),
            files: vec![FileDelta {
                path: "src/lib.rs".into(),
                old_path: None,
                kind: ChangeKind::Modified,
                binary: false,
                lines_added: add,
                lines_removed: 1,
                method_complexities: vec![2],
                hunks: vec![],
            }],
            is_merge: false,
            sequence: id,
        }
    }

    fn run(c: CiConclusion) -> CiRun {
        CiRun {
            run_id: "r".into(),
            finished_at: t0(),
            conclusion: c,
        }
    }

    #[test]
    fn success_rate_examples() {
        use CiConclusion::*;
        let mut runs = vec![run(Success); 8];
        runs.extend(vec![run(Failure); 2]);
        assert_eq!(ci_cd_success_rate(&runs), Some(0.8));
        let mut runs = vec![run(Success); 3];
        runs.extend(vec![run(Other); 5]);
        assert_eq!(ci_cd_success_rate(&runs), Some(1.0));
        assert_eq!(ci_cd_success_rate(&[run(Other)]), None);
    }

    fn pr(created_h: i64, merged_h: Option<i64>) -> PullRequest {
        PullRequest {
            number: 1,
            author_login: "x".into(),
            created_at: t0() + Duration::hours(created_h),
            merged_at: merged_h.map(|h| t0() + Duration::hours(h)),
            closed_at: None,
        }
    }

    #[test]
    fn merge_time_examples() {
        assert_eq!(avg_pr_merge_time(&[pr(0, Some(2)), pr(1, Some(5))]), Some(3.0));
        assert_eq!(avg_pr_merge_time(&[pr(0, None)]), None);
        assert_eq!(avg_pr_merge_time(&[pr(0, Some(1)), pr(0, Some(1)), pr(0, Some(10))]), Some(4.0));
    }

    #[test]
    fn efficiency_examples() {
        let cs = [commit(0, "a", "a@x", 0, "", 1), commit(1, "a", "a@x", 2, "", 1), commit(2, "a", "a@x", 4, "", 1)];
        let refs: Vec<&CommitRecord> = cs.iter().collect();
        assert_eq!(efficiency_metrics(&refs).mean_commit_gap_hours, Some(2.0));

        let cs: Vec<CommitRecord> = (0..6).map(|i| commit(i, "a", "a@x", (i as i64 / 2) * 24, "", 1)).collect();
        let refs: Vec<&CommitRecord> = cs.iter().collect();
        let e = efficiency_metrics(&refs);
        assert_eq!(e.active_days, 3);
        assert_eq!(e.avg_daily_commits, 2.0);
        assert_eq!(e.avg_daily_churn, 4.0);

        let e = efficiency_metrics(&refs[..1]);
        assert_eq!(e.mean_commit_gap_hours, None);
        assert_eq!(e.avg_daily_commits, 1.0);
    }

    #[test]
    fn rows_merge_aliases_and_skip_bots() {
        let mut commits = Vec::new();
        for i in 0..3 {
            commits.push(commit(i, "Jane Doe", "jane@x.com", i as i64, "add thing", 3));
        }
        for i in 3..7 {
            commits.push(commit(i, "jane doe", "jd@y.com", i as i64, "fix crash", 3));
        }
        commits.push(commit(7, "dependabot[bot]", "bot@x.com", 8, "bump", 1));
        let history = RepoHistory::new("p", commits);
        let (ids, _) = dealias(&history.commits, &AliasOverrides::default());
        let (ids, _) = filter_bots(ids, &BotPatterns::default());
        let mut labels = vec![SentimentLabel::Neutral; 8];
        labels[4] = SentimentLabel::Negative;
        let mut snap = ForgeSnapshot::empty("p");
        snap.issues.push(IssueRecord {
            number: 1,
            author_login: "jd".into(),
            created_at: t0(),
            state: IssueState::Open,
        });
        snap.issues.push(IssueRecord {
            number: 2,
            author_login: "stranger".into(),
            created_at: t0(),
            state: IssueState::Closed,
        });
        let out = build_author_rows(&history, &snap, &labels, &ids, &MetricsOptions::default()).unwrap();
        assert_eq!(out.rows.len(), 1);
        let r = &out.rows[0];
        assert_eq!(r.canonical_id, "jane@x.com");
        assert_eq!(r.total_commits, 7);
        assert_eq!(r.bug_fix_commits, 4);
        assert_eq!(r.code_churn, 28);
        assert_eq!(r.total_issues, 1);
        assert_eq!(r.avg_complexity_per_method, Some(2.0));
        assert!((r.negative_commit_pct - 100.0 / 7.0).abs() < 1e-12);
        assert_eq!(out.forge_only[0].login, "stranger");
        assert_eq!(out.totals.total_issues, 2);
        assert_eq!(out.repo.total_commits, 7);

        let err = build_author_rows(&history, &snap, &labels[..3], &ids, &MetricsOptions::default()).unwrap_err();
        assert!(matches!(err, MetricsError::AlignmentError { labels: 3, commits: 8, .. }));
    }

    #[test]
    fn csv_header_is_exact() {
        let mut buf = Vec::new();
        write_author_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap().trim_end(),
            "project,author,total_commits,code_churn,bug_fix_commits,avg_complexity,negative_commit_pct,total_issues,total_prs,project_age_years,mean_commit_gap_hours,avg_daily_commits,avg_daily_churn,total_code_reviews,total_deployments"
        );
    }
}
