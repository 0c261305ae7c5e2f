//! Forge metadata (pull requests, issues, CI runs) loaded from snapshot
//! files. Live fetching only ever produces snapshot files.

mod live;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::parse_iso;

pub use live::{fetch_live, FetchOptions, TOKEN_ENV};

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("cannot parse timestamp at {path}: {value:?}")]
    TimestampParseError { path: String, value: String },
    #[error("authentication failed: {0}")]
    AuthFailure(String),
    #[error("rate limited by the forge{}", .retry_after_secs.map(|s| format!(", retry after {s}s")).unwrap_or_default())]
    RateLimited { retry_after_secs: Option<u64> },
    #[error("network error: {0}")]
    NetworkError(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullRequest {
    pub number: u64,
    pub author_login: String,
    #[serde(with = "crate::time::iso")]
    pub created_at: DateTime<Utc>,
    #[serde(with = "crate::time::iso_opt")]
    pub merged_at: Option<DateTime<Utc>>,
    #[serde(with = "crate::time::iso_opt")]
    pub closed_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IssueState {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueRecord {
    pub number: u64,
    pub author_login: String,
    #[serde(with = "crate::time::iso")]
    pub created_at: DateTime<Utc>,
    pub state: IssueState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiConclusion {
    Success,
    Failure,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiRun {
    pub run_id: String,
    #[serde(with = "crate::time::iso")]
    pub finished_at: DateTime<Utc>,
    pub conclusion: CiConclusion,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtraColumns {
    pub total_code_reviews: u64,
    pub total_deployments: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgeSnapshot {
    pub project_name: String,
    pub pull_requests: Vec<PullRequest>,
    pub issues: Vec<IssueRecord>,
    pub ci_runs: Vec<CiRun>,
    pub extra_columns: BTreeMap<String, ExtraColumns>,
}

impl ForgeSnapshot {
    pub fn empty(project_name: impl Into<String>) -> Self {
        Self {
            project_name: project_name.into(),
            pull_requests: Vec::new(),
            issues: Vec::new(),
            ci_runs: Vec::new(),
            extra_columns: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("snapshot serializes");
        s.push('\n');
        s
    }
}

// Wire shapes: timestamps stay strings so parse failures can name their path.

#[derive(Deserialize)]
struct RawSnapshot {
    project_name: String,
    #[serde(default)]
    pull_requests: Vec<RawPullRequest>,
    #[serde(default)]
    issues: Vec<RawIssue>,
    #[serde(default)]
    ci_runs: Vec<RawCiRun>,
    #[serde(default)]
    extra_columns: BTreeMap<String, ExtraColumns>,
}

#[derive(Deserialize)]
struct RawPullRequest {
    number: u64,
    author_login: String,
    created_at: String,
    #[serde(default)]
    merged_at: Option<String>,
    #[serde(default)]
    closed_at: Option<String>,
}

#[derive(Deserialize)]
struct RawIssue {
    number: u64,
    author_login: String,
    created_at: String,
    state: IssueState,
}

#[derive(Deserialize)]
struct RawCiRun {
    run_id: String,
    finished_at: String,
    conclusion: CiConclusion,
}

fn ts(path: String, value: &str) -> Result<DateTime<Utc>, ForgeError> {
    parse_iso(value).map_err(|_| ForgeError::TimestampParseError {
        path,
        value: value.to_string(),
    })
}

fn positive(path: String, number: u64) -> Result<u64, ForgeError> {
    if number == 0 {
        Err(ForgeError::SchemaViolation {
            path,
            message: "number must be positive".into(),
        })
    } else {
        Ok(number)
    }
}

/// Parses and validates a snapshot document.
pub fn parse_snapshot(text: &str) -> Result<ForgeSnapshot, ForgeError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawSnapshot = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ForgeError::SchemaViolation {
            path: if path == "." { "$".into() } else { format!("$.{path}") },
            message: e.into_inner().to_string(),
        }
    })?;

    let mut pull_requests = Vec::with_capacity(raw.pull_requests.len());
    for (i, pr) in raw.pull_requests.into_iter().enumerate() {
        let at = |field: &str| format!("$.pull_requests[{i}].{field}");
        let created_at = ts(at("created_at"), &pr.created_at)?;
        let merged_at = pr.merged_at.as_deref().map(|v| ts(at("merged_at"), v)).transpose()?;
        let closed_at = pr.closed_at.as_deref().map(|v| ts(at("closed_at"), v)).transpose()?;
        if merged_at.is_some_and(|m| m < created_at) {
            return Err(ForgeError::SchemaViolation {
                path: at("merged_at"),
                message: "merged_at precedes created_at".into(),
            });
        }
        pull_requests.push(PullRequest {
            number: positive(at("number"), pr.number)?,
            author_login: pr.author_login,
            created_at,
            merged_at,
            closed_at,
        });
    }

    let mut seen = BTreeSet::new();
    let mut issues = Vec::with_capacity(raw.issues.len());
    for (i, issue) in raw.issues.into_iter().enumerate() {
        let at = |field: &str| format!("$.issues[{i}].{field}");
        if !seen.insert(issue.number) {
            return Err(ForgeError::SchemaViolation {
                path: at("number"),
                message: format!("duplicate issue number {}", issue.number),
            });
        }
        issues.push(IssueRecord {
            number: positive(at("number"), issue.number)?,
            author_login: issue.author_login,
            created_at: ts(at("created_at"), &issue.created_at)?,
            state: issue.state,
        });
    }

    let ci_runs = raw
        .ci_runs
        .into_iter()
        .enumerate()
        .map(|(i, run)| {
            Ok(CiRun {
                finished_at: ts(format!("$.ci_runs[{i}].finished_at"), &run.finished_at)?,
                run_id: run.run_id,
                conclusion: run.conclusion,
            })
        })
        .collect::<Result<_, ForgeError>>()?;

    Ok(ForgeSnapshot {
        project_name: raw.project_name,
        pull_requests,
        issues,
        ci_runs,
        extra_columns: raw.extra_columns,
    })
}

pub fn load_snapshot(path: &Path) -> Result<ForgeSnapshot, ForgeError> {
    let text = std::fs::read_to_string(path).map_err(|source| ForgeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_snapshot(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PRS: &str = r#"{
        "project_name": "demo",
        "pull_requests": [
            {"number": 1, "author_login": "ann", "created_at": "2024-01-01T00:00:00Z", "merged_at": "2024-01-01T02:00:00Z", "closed_at": "2024-01-01T02:00:00Z"},
            {"number": 2, "author_login": "bob", "created_at": "2024-01-02T00:00:00Z", "merged_at": null, "closed_at": null, "labels": ["x"]}
        ],
        "issues": [],
        "ci_runs": [
            {"run_id": "a", "finished_at": "2024-01-01T00:00:00Z", "conclusion": "success"},
            {"run_id": "b", "finished_at": "2024-01-01T00:00:00Z", "conclusion": "failure"},
            {"run_id": "c", "finished_at": "2024-01-01T00:00:00Z", "conclusion": "other"}
        ],
        "unknown_top_level": 5
    }"#;

    #[test]
    fn loads_counts() {
        let s = parse_snapshot(TWO_PRS).unwrap();
        assert_eq!(s.pull_requests.len(), 2);
        assert_eq!(s.issues.len(), 0);
        assert_eq!(s.ci_runs.len(), 3);
        assert!(s.extra_columns.is_empty());
    }

    #[test]
    fn missing_sections_are_empty() {
        let s = parse_snapshot(r#"{"project_name": "p", "pull_requests": []}"#).unwrap();
        assert!(s.ci_runs.is_empty());
        assert!(s.issues.is_empty());
    }

    #[test]
    fn merge_before_creation_is_rejected() {
        let doc = r#"{"project_name": "p", "pull_requests": [
            {"number": 3, "author_login": "a", "created_at": "2024-01-02T00:00:00Z", "merged_at": "2024-01-01T00:00:00Z"}]}"#;
        match parse_snapshot(doc) {
            Err(ForgeError::SchemaViolation { path, .. }) => assert_eq!(path, "$.pull_requests[0].merged_at"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_type_names_json_path() {
        let doc = r#"{"project_name": "p", "issues": [{"number": "seven", "author_login": "a", "created_at": "2024-01-01T00:00:00Z", "state": "open"}]}"#;
        match parse_snapshot(doc) {
            Err(ForgeError::SchemaViolation { path, .. }) => assert!(path.contains("issues[0].number"), "{path}"),
            other => panic!("unexpected {other:?}"),
        }
        let doc = r#"{"pull_requests": []}"#;
        assert!(matches!(parse_snapshot(doc), Err(ForgeError::SchemaViolation { .. })));
        let doc = r#"{"project_name": "p", "ci_runs": [{"run_id": "x", "finished_at": "2024-01-01T00:00:00Z", "conclusion": "cancelled"}]}"#;
        assert!(matches!(parse_snapshot(doc), Err(ForgeError::SchemaViolation { .. })));
    }

    #[test]
    fn bad_timestamp() {
        let doc = r#"{"project_name": "p", "ci_runs": [{"run_id": "x", "finished_at": "yesterday", "conclusion": "success"}]}"#;
        match parse_snapshot(doc) {
            Err(ForgeError::TimestampParseError { path, value }) => {
                assert_eq!(path, "$.ci_runs[0].finished_at");
                assert_eq!(value, "yesterday");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_issue_numbers() {
        let doc = r#"{"project_name": "p", "issues": [
            {"number": 1, "author_login": "a", "created_at": "2024-01-01T00:00:00Z", "state": "open"},
            {"number": 1, "author_login": "b", "created_at": "2024-01-01T00:00:00Z", "state": "closed"}]}"#;
        assert!(matches!(parse_snapshot(doc), Err(ForgeError::SchemaViolation { .. })));
    }

    #[test]
    fn serialization_round_trips() {
        let mut s = parse_snapshot(TWO_PRS).unwrap();
        s.extra_columns.insert("ann".into(), ExtraColumns { total_code_reviews: 4, total_deployments: 1 });
        assert_eq!(parse_snapshot(&s.to_json()).unwrap(), s);
    }
}
