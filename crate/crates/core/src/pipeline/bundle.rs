//! The machine-readable summary a report is rendered from.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use spacex_stats::{mean, quantile_sorted, sample_sd};

use super::config::{AnalysisKind, AnalysisSpec, LoadedConfig};
use super::{AnalysisResult, CommunicationEvent, FileOwnership};
use crate::cleaning::CleaningReport;
use crate::communication::{pair_summary, time_diff_stats, PairCount};
use crate::cps::{CpsTable, DimensionVector};
use crate::ingest::RepoHistory;
use crate::metrics::{IssueScope, RepoRow};
use crate::table::Table;
use crate::time::format_iso;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub name: String,
    pub kind: AnalysisKind,
    pub dataset: String,
    pub dataset_sha256: String,
    pub file: String,
    pub residuals_file: Option<String>,
    pub spec: AnalysisSpec,
    pub result: AnalysisResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub column: String,
    pub n: usize,
    pub missing: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub min: Option<f64>,
    pub median: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub dataset: String,
    pub sha256: String,
    pub rows: usize,
    pub columns: Vec<ColumnSummary>,
}

/// Count, mean, sample sd and type-7 median of every numeric column.
pub fn describe(table: &Table) -> Vec<ColumnSummary> {
    table
        .columns
        .iter()
        .map(|c| {
            let mut v = c.present();
            v.sort_by(f64::total_cmp);
            let some = |x: f64| (!v.is_empty()).then_some(x);
            ColumnSummary {
                column: c.name.clone(),
                n: v.len(),
                missing: c.len() - v.len(),
                mean: some(mean(&v)).filter(|x| x.is_finite()),
                sd: (v.len() > 1).then(|| sample_sd(&v)),
                min: v.first().copied(),
                median: some(0.0).map(|_| quantile_sorted(&v, 0.5)),
                max: v.last().copied(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectProvenance {
    pub project_name: String,
    pub commits: usize,
    pub head_commit: Option<String>,
    pub first_commit_at: String,
    pub last_commit_at: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub sentiment_model: String,
    /// Whether issue and PR counts in the author datasets are per author or per project.
    pub issues_prs_scope: IssueScope,
    pub data_through: Option<String>,
    pub projects: Vec<ProjectProvenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileSummary {
    pub project_name: String,
    pub files: usize,
    pub mean_top_share_pct: Option<f64>,
    pub events: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunicationSummary {
    pub window_hours: f64,
    pub strict_alternation: bool,
    pub total_events: usize,
    pub mean_gap_hours: Option<f64>,
    pub histogram: Vec<usize>,
    pub top_pairs: Vec<PairCount>,
    pub per_project: Vec<FileSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpsEntry {
    pub rank: usize,
    pub project_name: String,
    pub canonical_id: String,
    #[serde(deserialize_with = "spacex_stats::serde_float::deserialize")]
    pub cps: f64,
    pub z: DimensionVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpsSummary {
    pub weights: [f64; 5],
    pub dropped_dimensions: Vec<String>,
    pub ranking: Vec<CpsEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub provenance: Provenance,
    pub cleaning: CleaningReport,
    pub datasets: Vec<DatasetSummary>,
    pub repos: Vec<RepoRow>,
    pub communication: CommunicationSummary,
    pub models: Vec<ModelEntry>,
    pub cps: Option<CpsSummary>,
    pub warnings: Vec<String>,
}

pub(super) struct StateView<'a> {
    pub histories: &'a [RepoHistory],
    pub cleaning: &'a CleaningReport,
    pub model_id: &'a str,
    pub tables: &'a BTreeMap<String, (Table, String)>,
    pub repos: &'a [RepoRow],
    pub events: &'a [(String, Vec<CommunicationEvent>)],
    pub ownership: &'a [(String, Vec<FileOwnership>)],
    pub cps: Option<&'a CpsTable>,
    pub models: &'a [ModelEntry],
    pub warnings: &'a [String],
}

pub(super) fn assemble(cfg: &LoadedConfig, st: StateView<'_>) -> Bundle {
    let projects = st
        .histories
        .iter()
        .map(|h| ProjectProvenance {
            project_name: h.project_name.clone(),
            commits: h.commits.len(),
            head_commit: h.commits.last().map(|c| c.commit_id.clone()),
            first_commit_at: format_iso(&h.first_commit_at),
            last_commit_at: format_iso(&h.last_commit_at),
        })
        .collect();
    let provenance = Provenance {
        tool: "spacex".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: cfg.sha256.clone(),
        sentiment_model: st.model_id.to_string(),
        issues_prs_scope: cfg.config.metrics.issues_prs_scope,
        data_through: st.histories.iter().map(|h| h.last_commit_at).max().map(|t| format_iso(&t)),
        projects,
    };
    let datasets = st
        .tables
        .iter()
        .map(|(name, (t, sha))| DatasetSummary {
            dataset: name.clone(),
            sha256: sha.clone(),
            rows: t.n_rows(),
            columns: describe(t),
        })
        .collect();

    let all: Vec<CommunicationEvent> = st.events.iter().flat_map(|(_, e)| e.iter().cloned()).collect();
    let stats = time_diff_stats(&all);
    let mut top_pairs = pair_summary(&all);
    top_pairs.truncate(10);
    let per_project = st
        .ownership
        .iter()
        .map(|(p, files)| {
            let shares: Vec<f64> = files.iter().map(|f| f.top_share_pct).collect();
            FileSummary {
                project_name: p.clone(),
                files: files.len(),
                mean_top_share_pct: (!shares.is_empty()).then(|| mean(&shares)),
                events: st.events.iter().find(|(q, _)| q == p).map_or(0, |(_, e)| e.len()),
            }
        })
        .collect();
    let communication = CommunicationSummary {
        window_hours: cfg.config.communication.window_hours,
        strict_alternation: cfg.config.communication.strict_alternation,
        total_events: all.len(),
        mean_gap_hours: stats.as_ref().map(|s| s.mean_gap_hours),
        histogram: stats.map(|s| s.histogram).unwrap_or_else(|| vec![0; 24]),
        top_pairs,
        per_project,
    };

    let cps = st.cps.map(|t| {
        let mut ranked: Vec<_> = t.rows.iter().collect();
        ranked.sort_by(|a, b| {
            b.cps
                .total_cmp(&a.cps)
                .then_with(|| a.project_name.cmp(&b.project_name))
                .then_with(|| a.canonical_id.cmp(&b.canonical_id))
        });
        CpsSummary {
            weights: t.weights.0,
            dropped_dimensions: t.dropped.iter().map(|d| d.to_string()).collect(),
            ranking: ranked
                .into_iter()
                .enumerate()
                .map(|(i, r)| CpsEntry {
                    rank: i + 1,
                    project_name: r.project_name.clone(),
                    canonical_id: r.canonical_id.clone(),
                    cps: r.cps,
                    z: r.z,
                })
                .collect(),
        }
    });

    Bundle {
        provenance,
        cleaning: st.cleaning.clone(),
        datasets,
        repos: st.repos.to_vec(),
        communication,
        models: st.models.to_vec(),
        cps,
        warnings: st.warnings.to_vec(),
    }
}
