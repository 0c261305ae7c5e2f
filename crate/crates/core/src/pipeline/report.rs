//! Markdown report and plot data rendered from a finished bundle.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::bundle::{Bundle, ColumnSummary};
use super::output::{sha256_hex, Manifest, ManifestEntry, MANIFEST};
use super::{AnalysisResult, CorrelationMatrix, PipelineError, RunOutcome};
use crate::cps::DIMENSIONS;
use crate::format::fixed;
use crate::metrics::IssueScope;
use spacex_stats::{ModelKind, StatReport};

/// Columns shown under each dimension heading, as (dataset, column).
const DIMENSION_COLUMNS: [(&str, &[(&str, &str)]); 5] = [
    ("Satisfaction", &[("authors", "negative_commit_pct")]),
    (
        "Performance",
        &[
            ("authors", "bug_fix_commits"),
            ("authors", "avg_complexity"),
            ("authors", "total_issues"),
            ("repos", "ci_cd_success_rate"),
        ],
    ),
    (
        "Activity",
        &[
            ("authors", "total_commits"),
            ("authors", "code_churn"),
            ("authors", "total_prs"),
            ("authors", "total_code_reviews"),
            ("authors", "total_deployments"),
        ],
    ),
    (
        "Communication",
        &[
            ("files", "cif"),
            ("files", "top_share_pct"),
            ("files", "mean_event_gap_hours"),
        ],
    ),
    (
        "Efficiency",
        &[
            ("efficiency", "mean_commit_gap_hours"),
            ("efficiency", "avg_daily_commits"),
            ("efficiency", "avg_daily_churn"),
            ("repos", "avg_pr_merge_time_hours"),
        ],
    ),
];

fn num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.3}"),
        _ => "n/a".into(),
    }
}

fn pval(p: f64) -> String {
    if !p.is_finite() {
        "n/a".into()
    } else if p < 0.001 {
        "<0.001".into()
    } else {
        format!("{p:.3}")
    }
}

fn summary_row(s: &ColumnSummary, dataset: &str) -> String {
    format!(
        "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
        s.column,
        dataset,
        s.n,
        num(s.mean),
        num(s.sd),
        num(s.min),
        num(s.median),
        num(s.max)
    )
}

fn matrix_table(out: &mut String, m: &CorrelationMatrix) {
    out.push_str("| |");
    for c in &m.columns {
        let _ = write!(out, " {c} |");
    }
    out.push_str("\n|---|");
    for _ in &m.columns {
        out.push_str("---|");
    }
    out.push('\n');
    for (i, row) in m.columns.iter().enumerate() {
        let _ = write!(out, "| {row} |");
        for j in 0..m.columns.len() {
            if j > i {
                out.push_str(" |");
            } else if i == j {
                out.push_str(" 1 |");
            } else {
                let _ = write!(out, " {:.3} / {} |", m.r[i][j], pval(m.p[i][j]));
            }
        }
        out.push('\n');
    }
}

fn kind_label(k: ModelKind) -> &'static str {
    match k {
        ModelKind::Pearson => "Pearson correlation",
        ModelKind::Ols => "OLS regression",
        ModelKind::PartialCorr => "Partial correlation",
        ModelKind::Poisson => "Poisson regression",
    }
}

fn model_table(out: &mut String, rep: &StatReport) {
    out.push_str("| term | estimate | std. error | statistic | p |\n|---|---|---|---|---|\n");
    for (name, t) in &rep.coefficients {
        let _ = writeln!(
            out,
            "| {name} | {} | {} | {} | {} |",
            num(Some(t.estimate)),
            num(Some(t.std_error)),
            num(Some(t.test_statistic)),
            pval(t.p_value)
        );
    }
    let mut fit = vec![format!("n = {}", rep.n_used), format!("dropped = {}", rep.n_dropped)];
    if let Some(r2) = rep.r_squared {
        fit.push(format!("R² = {}", num(Some(r2))));
    }
    if let Some(a) = rep.adj_r_squared {
        fit.push(format!("adj. R² = {}", num(Some(a))));
    }
    if let Some(f) = &rep.f_statistic {
        fit.push(format!("F({}, {}) = {}, p = {}", f.df_model, f.df_residual, num(Some(f.value)), pval(f.p)));
    }
    if let Some(d) = rep.deviance {
        fit.push(format!("deviance = {}", num(Some(d))));
    }
    if let Some(c) = rep.converged {
        fit.push(format!("converged = {c}"));
    }
    let _ = writeln!(out, "\n{}", fit.join(", "));
    if !rep.transform_log.is_empty() {
        out.push('\n');
    }
    for line in &rep.transform_log {
        let _ = writeln!(out, "- {line}");
    }
}

/// Renders the full Markdown report.
pub fn render_report(b: &Bundle) -> String {
    let mut o = String::new();
    o.push_str("# SPACE productivity report\n\n## Provenance\n\n");
    let p = &b.provenance;
    let _ = writeln!(o, "- tool: {} {}", p.tool, p.version);
    let _ = writeln!(o, "- config sha256: `{}`", p.config_sha256);
    let _ = writeln!(o, "- sentiment model: `{}`", p.sentiment_model);
    let _ = writeln!(
        o,
        "- issue and PR counts: {}",
        match p.issues_prs_scope {
            IssueScope::Author => "per author",
            IssueScope::Project => "per project",
        }
    );
    let _ = writeln!(o, "- data through: {}", p.data_through.as_deref().unwrap_or("n/a"));
    o.push_str("\n| project | commits | first commit | last commit | head |\n|---|---|---|---|---|\n");
    for pr in &p.projects {
        let _ = writeln!(
            o,
            "| {} | {} | {} | {} | `{}` |",
            pr.project_name,
            pr.commits,
            pr.first_commit_at,
            pr.last_commit_at,
            pr.head_commit.as_deref().map(|h| &h[..h.len().min(12)]).unwrap_or("")
        );
    }

    let c = &b.cleaning;
    o.push_str("\n## Cleaning\n\n");
    let _ = writeln!(o, "- alias groups merged: {}", c.merged_alias_groups);
    let _ = writeln!(o, "- bot signatures removed: {}", c.bots_removed);
    let _ = writeln!(o, "- low-activity author rows removed: {}", c.low_activity_removed);
    let _ = writeln!(o, "- outlier rows removed (efficiency dataset): {}", c.outlier_rows_removed);
    let _ = writeln!(o, "- winsorized cells: {}", c.winsorized_cells);
    for (k, v) in &c.parameters {
        let _ = writeln!(o, "- `{k}`: {v}");
    }

    o.push_str("\n## Dimensions\n");
    for (dim, cols) in DIMENSION_COLUMNS {
        let _ = write!(
            o,
            "\n### {dim}\n\n| metric | dataset | n | mean | sd | min | median | max |\n|---|---|---|---|---|---|---|---|\n"
        );
        for (ds, col) in cols {
            let s = b
                .datasets
                .iter()
                .find(|d| d.dataset == *ds)
                .and_then(|d| d.columns.iter().find(|c| c.column == *col));
            if let Some(s) = s {
                o.push_str(&summary_row(s, ds));
            }
        }
    }

    let matrices: Vec<_> = b
        .models
        .iter()
        .filter_map(|m| match &m.result {
            AnalysisResult::Matrix(x) => Some((m, x)),
            _ => None,
        })
        .collect();
    if !matrices.is_empty() {
        o.push_str("\n## Correlations\n\nCells show Pearson r / two-sided p.\n");
        for (m, x) in matrices {
            let _ = writeln!(o, "\n### {} (`{}`)\n", m.name, m.dataset);
            matrix_table(&mut o, x);
        }
    }

    o.push_str("\n## Models\n");
    for m in &b.models {
        match &m.result {
            AnalysisResult::Model(rep) => {
                let _ = writeln!(
                    o,
                    "\n### {}\n\n{} on `{}`, response `{}`, dataset sha256 `{}`\n",
                    m.name,
                    kind_label(rep.model_kind),
                    m.dataset,
                    rep.response,
                    &m.dataset_sha256[..m.dataset_sha256.len().min(12)]
                );
                model_table(&mut o, rep);
            }
            AnalysisResult::Vif(v) => {
                let _ = writeln!(o, "\n### {}\n\nVariance inflation factors on `{}`\n", m.name, m.dataset);
                o.push_str("| predictor | VIF |\n|---|---|\n");
                for (k, x) in v {
                    let _ = writeln!(o, "| {k} | {} |", num(Some(*x)));
                }
            }
            AnalysisResult::Matrix(_) => {}
        }
    }

    let cm = &b.communication;
    o.push_str("\n## Communication\n\n");
    let _ = writeln!(
        o,
        "Window {} h, strict alternation {}. {} interaction events, mean gap {} h.\n",
        cm.window_hours,
        cm.strict_alternation,
        cm.total_events,
        num(cm.mean_gap_hours)
    );
    if cm.top_pairs.is_empty() {
        o.push_str("### Top pairs\n\nNo interaction events were found.\n");
    } else {
        o.push_str("### Top pairs\n\n| author | author | events |\n|---|---|---|\n");
        for p in &cm.top_pairs {
            let _ = writeln!(o, "| {} | {} | {} |", p.author_a, p.author_b, p.events);
        }
    }
    o.push_str("\n### Gap histogram\n\n| hour | events |\n|---|---|\n");
    for (h, n) in cm.histogram.iter().enumerate() {
        let _ = writeln!(o, "| {h} | {n} |");
    }
    o.push_str("\n| project | files | mean top share % | events |\n|---|---|---|---|\n");
    for f in &cm.per_project {
        let _ = writeln!(o, "| {} | {} | {} | {} |", f.project_name, f.files, num(f.mean_top_share_pct), f.events);
    }

    if let Some(cps) = &b.cps {
        o.push_str("\n## Composite score\n\n");
        o.push_str(
            "A constructed index: the weighted sum of per-dimension z-scores. It is not a validated measure of productivity.\n\n",
        );
        let w: Vec<String> = DIMENSIONS
            .iter()
            .zip(cps.weights)
            .map(|(d, w)| format!("{d} {w}"))
            .collect();
        let _ = writeln!(o, "Weights: {}.", w.join(", "));
        if !cps.dropped_dimensions.is_empty() {
            let _ = writeln!(o, "Dropped (zero variance): {}.", cps.dropped_dimensions.join(", "));
        }
        o.push_str("\n| rank | project | author | score |\n|---|---|---|---|\n");
        for e in &cps.ranking {
            let _ = writeln!(o, "| {} | {} | {} | {} |", e.rank, e.project_name, e.canonical_id, num(Some(e.cps)));
        }
    }

    if !b.warnings.is_empty() {
        o.push_str("\n## Warnings\n\n");
        for w in &b.warnings {
            let _ = writeln!(o, "- {w}");
        }
    }
    o
}

fn plot_csvs(b: &Bundle) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut h = String::from("bucket_start_hour,count\n");
    for (i, n) in b.communication.histogram.iter().enumerate() {
        let _ = writeln!(h, "{i},{n}");
    }
    files.push(("report/time_diff_histogram.csv".to_string(), h.into_bytes()));
    if let Some(cps) = &b.cps {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["rank", "project", "author", "cps"]);
        for e in &cps.ranking {
            let _ = w.write_record([e.rank.to_string(), e.project_name.clone(), e.canonical_id.clone(), fixed(e.cps)]);
        }
        files.push(("report/cps_ranking.csv".to_string(), w.into_inner().unwrap_or_default()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["author_a", "author_b", "events"]);
    for p in &b.communication.top_pairs {
        let _ = w.write_record([p.author_a.clone(), p.author_b.clone(), p.events.to_string()]);
    }
    files.push(("report/top_pairs.csv".to_string(), w.into_inner().unwrap_or_default()));
    files
}

/// `spacex report`: verifies the bundle, renders the report and records
/// the new files in the manifest.
pub fn cmd_report(out_dir: &Path) -> Result<RunOutcome, PipelineError> {
    let mut manifest = Manifest::load(out_dir)?;
    let (mut missing, modified) = manifest.verify(out_dir);
    if !manifest.files.iter().any(|f| f.path == "bundle.json") {
        missing.push("bundle.json".into());
    }
    if !missing.is_empty() || !modified.is_empty() {
        return Err(PipelineError::MissingArtifact { missing, modified });
    }
    let path = out_dir.join("bundle.json");
    let text = fs::read_to_string(&path).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
    let bundle: Bundle =
        serde_json::from_str(&text).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;

    let mut files = plot_csvs(&bundle);
    files.push(("report.md".to_string(), render_report(&bundle).into_bytes()));
    manifest.files.retain(|f| !files.iter().any(|(p, _)| *p == f.path));
    for (rel, bytes) in &files {
        let p = out_dir.join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).map_err(|e| PipelineError::Io {
                path: parent.display().to_string(),
                message: e.to_string(),
            })?;
        }
        fs::write(&p, bytes).map_err(|e| PipelineError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        })?;
        manifest.files.push(ManifestEntry {
            path: rel.clone(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
    }
    manifest.files.sort_by(|a, b| a.path.cmp(&b.path));
    let mp = out_dir.join(MANIFEST);
    fs::write(&mp, manifest.to_json()).map_err(|e| PipelineError::Io {
        path: mp.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(RunOutcome {
        out_dir: out_dir.to_path_buf(),
        manifest,
        warnings: bundle.warnings,
    })
}
