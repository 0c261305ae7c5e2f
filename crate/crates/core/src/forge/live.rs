use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::Value;
use ureq::Agent;

use super::{
    load_snapshot, CiConclusion, CiRun, ForgeError, ForgeSnapshot, IssueRecord, IssueState,
    PullRequest,
};
use crate::time::parse_iso;

/// Environment variable holding the forge API token.
pub const TOKEN_ENV: &str = "SPACEX_FORGE_TOKEN";

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub api_base: String,
    /// Where the snapshot file is written.
    pub out_path: PathBuf,
    /// Defaults to the repository part of the slug.
    pub project_name: Option<String>,
    pub per_page: usize,
}

impl FetchOptions {
    pub fn new(out_path: impl Into<PathBuf>) -> Self {
        Self {
            api_base: "https://api.github.com".into(),
            out_path: out_path.into(),
            project_name: None,
            per_page: 100,
        }
    }
}

/// Fetches pull requests, issues and workflow runs for `owner/repo`, writes
/// them as a snapshot file and returns that file, loaded back. The token is
/// taken from [`TOKEN_ENV`].
pub fn fetch_live(project_slug: &str, opts: &FetchOptions) -> Result<ForgeSnapshot, ForgeError> {
    let token = std::env::var(TOKEN_ENV)
        .ok()
        .filter(|t| !t.trim().is_empty())
        .ok_or_else(|| ForgeError::AuthFailure(format!("{TOKEN_ENV} is not set")))?;
    let token = token.as_str();
    let agent: Agent = Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(60)))
        .build()
        .into();
    let base = opts.api_base.trim_end_matches('/');
    let project_name = opts.project_name.clone().unwrap_or_else(|| {
        project_slug
            .rsplit('/')
            .next()
            .unwrap_or(project_slug)
            .to_string()
    });
    let mut snapshot = ForgeSnapshot::empty(project_name);

    for item in paginate(&agent, token, &format!("{base}/repos/{project_slug}/pulls?state=all"), opts.per_page, None)? {
        snapshot.pull_requests.push(PullRequest {
            number: item["number"].as_u64().unwrap_or(0),
            author_login: login(&item),
            created_at: time_field(&item, "created_at")?.ok_or_else(|| missing("created_at"))?,
            merged_at: time_field(&item, "merged_at")?,
            closed_at: time_field(&item, "closed_at")?,
        });
    }

    for item in paginate(&agent, token, &format!("{base}/repos/{project_slug}/issues?state=all"), opts.per_page, None)? {
        if item.get("pull_request").is_some() {
            continue;
        }
        snapshot.issues.push(IssueRecord {
            number: item["number"].as_u64().unwrap_or(0),
            author_login: login(&item),
            created_at: time_field(&item, "created_at")?.ok_or_else(|| missing("created_at"))?,
            state: if item["state"].as_str() == Some("closed") {
                IssueState::Closed
            } else {
                IssueState::Open
            },
        });
    }

    for item in paginate(
        &agent,
        token,
        &format!("{base}/repos/{project_slug}/actions/runs"),
        opts.per_page,
        Some("workflow_runs"),
    )? {
        if item["status"].as_str().is_some_and(|s| s != "completed") {
            continue;
        }
        let conclusion = match item["conclusion"].as_str() {
            Some("success") => CiConclusion::Success,
            Some("failure") | Some("timed_out") | Some("startup_failure") => CiConclusion::Failure,
            _ => CiConclusion::Other,
        };
        let run_id = match &item["id"] {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            _ => continue,
        };
        let Some(finished_at) = time_field(&item, "updated_at")? else {
            continue;
        };
        snapshot.ci_runs.push(CiRun {
            run_id,
            finished_at,
            conclusion,
        });
    }

    write_snapshot(&opts.out_path, &snapshot)?;
    load_snapshot(&opts.out_path)
}

fn write_snapshot(path: &Path, snapshot: &ForgeSnapshot) -> Result<(), ForgeError> {
    let io = |source| ForgeError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, snapshot.to_json()).map_err(io)
}

fn missing(field: &str) -> ForgeError {
    ForgeError::SchemaViolation {
        path: field.into(),
        message: "missing in forge response".into(),
    }
}

fn login(item: &Value) -> String {
    item["user"]["login"].as_str().unwrap_or("ghost").to_string()
}

fn time_field(item: &Value, field: &str) -> Result<Option<chrono::DateTime<chrono::Utc>>, ForgeError> {
    match item[field].as_str() {
        None => Ok(None),
        Some(s) => parse_iso(s)
            .map(Some)
            .map_err(|_| ForgeError::TimestampParseError {
                path: field.into(),
                value: s.into(),
            }),
    }
}

fn paginate(
    agent: &Agent,
    token: &str,
    url: &str,
    per_page: usize,
    wrapper: Option<&str>,
) -> Result<Vec<Value>, ForgeError> {
    let sep = if url.contains('?') { '&' } else { '?' };
    let mut all = Vec::new();
    for page in 1.. {
        let page_url = format!("{url}{sep}per_page={per_page}&page={page}");
        let body = get_json(agent, token, &page_url)?;
        let items = match wrapper {
            Some(key) => body.get(key).cloned().unwrap_or(Value::Null),
            None => body,
        };
        let Value::Array(items) = items else {
            return Err(ForgeError::NetworkError(format!("{page_url}: expected a JSON array")));
        };
        let n = items.len();
        all.extend(items);
        if n < per_page {
            break;
        }
    }
    Ok(all)
}

fn get_json(agent: &Agent, token: &str, url: &str) -> Result<Value, ForgeError> {
    let mut resp = agent
        .get(url)
        .header("Authorization", &format!("Bearer {token}"))
        .header("Accept", "application/vnd.github+json")
        .header("User-Agent", "spacex")
        .call()
        .map_err(|e| ForgeError::NetworkError(format!("{url}: {e}")))?;
    let status = resp.status().as_u16();
    let header = |name: &str| {
        resp.headers()
            .get(name)
            .and_then(|v| v.to_str().ok())
            .map(str::to_string)
    };
    match status {
        200..=299 => resp
            .body_mut()
            .read_json::<Value>()
            .map_err(|e| ForgeError::NetworkError(format!("{url}: {e}"))),
        401 => Err(ForgeError::AuthFailure(format!("{url}: 401 Unauthorized"))),
        403 | 429 => {
            let retry_after = header("retry-after").and_then(|v| v.parse().ok());
            let exhausted = header("x-ratelimit-remaining").as_deref() == Some("0");
            if status == 429 || exhausted || retry_after.is_some() {
                let from_reset = header("x-ratelimit-reset")
                    .and_then(|v| v.parse::<i64>().ok())
                    .map(|reset| (reset - chrono::Utc::now().timestamp()).max(0) as u64);
                Err(ForgeError::RateLimited {
                    retry_after_secs: retry_after.or(from_reset),
                })
            } else {
                Err(ForgeError::AuthFailure(format!("{url}: 403 Forbidden")))
            }
        }
        _ => Err(ForgeError::NetworkError(format!("{url}: HTTP {status}"))),
    }
}
