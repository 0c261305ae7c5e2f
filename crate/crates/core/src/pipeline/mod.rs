//! End-to-end pipeline: mining, identity cleaning, sentiment, metrics,
//! row cleaning, models and composite scores, written as a hashed bundle.

mod analysis;
mod bundle;
pub mod config;
mod output;
mod report;
mod select;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use analysis::{run_analysis, AnalysisOutput, AnalysisResult, CorrelationMatrix};
pub use bundle::{describe, Bundle, ColumnSummary, DatasetSummary, ModelEntry};
pub use config::{AnalysisKind, AnalysisSpec, LoadedConfig, RunConfig, TransformOp, TransformSpec};
pub use output::{sha256_hex, Manifest, ManifestEntry, Staging, MANIFEST};
pub use report::{cmd_report, render_report};
pub use select::{select_projects, write_selection_csv, SelectionRow};

use crate::cleaning::{filter_low_activity, iqr_filter, winsorize_column, CleaningReport};
use crate::communication::{
    author_of, commit_interaction_frequency, contributor_experience, pair_summary, participation, time_diff_stats,
    write_events_csv, write_histogram_csv, write_ownership_csv, CifOptions, CommunicationEvent, FileOwnership,
};
use crate::cps::{score_population, write_cps_csv, CpsTable, ScoringProfile, WeightVector};
use crate::forge::{load_snapshot, ForgeError, ForgeSnapshot};
use crate::identity::{dealias, filter_bots, AliasOverrides, IdentityMap};
use crate::ingest::{walk_history, write_commits_csv, BugFixMatcher, IngestError, IngestOptions, RepoHistory};
use crate::metrics::{
    apply_project_scope, author_table, build_author_rows, repo_table, write_author_csv, write_forge_only_csv,
    write_repo_csv, write_totals_csv, AuthorProjectRow, IssueScope, MetricsOptions, ProjectTotals, RepoRow,
};
use crate::sentiment::{ExternalClassifier, LexiconClassifier, SentimentClassifier};
use crate::table::Table;
use crate::time::format_iso;
use config::SentimentMode;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Validation(String),
    #[error("{context}: unknown column `{column}` in dataset `{dataset}`")]
    UnknownColumn {
        context: String,
        dataset: String,
        column: String,
    },
    #[error("cannot mine {repo}")]
    Ingest {
        repo: String,
        #[source]
        source: IngestError,
    },
    #[error("cannot load snapshot {path}")]
    Forge {
        path: String,
        #[source]
        source: ForgeError,
    },
    #[error("stage {stage} failed: {message}")]
    Stage { stage: &'static str, message: String },
    #[error("bundle is incomplete: missing [{}], modified [{}]", .missing.join(", "), .modified.join(", "))]
    MissingArtifact { missing: Vec<String>, modified: Vec<String> },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl PipelineError {
    /// 1 for analysis or validation failures, 2 for unusable inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) | Self::Ingest { .. } | Self::Forge { .. } | Self::MissingArtifact { .. } => 2,
            Self::Validation(_) | Self::UnknownColumn { .. } | Self::Stage { .. } | Self::Io { .. } => 1,
        }
    }

    fn stage(stage: &'static str, e: impl std::fmt::Display) -> Self {
        Self::Stage {
            stage,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Mine,
    Clean,
    Metrics,
    Cps,
    Analyze,
}

impl Stage {
    pub fn command(self) -> &'static str {
        match self {
            Stage::Mine => "mine",
            Stage::Clean => "clean",
            Stage::Metrics => "metrics",
            Stage::Cps => "cps",
            Stage::Analyze => "analyze",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub keep_going: bool,
    pub through: Stage,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
    pub warnings: Vec<String>,
}

/// Everything computed so far, handed from stage to stage.
#[derive(Default)]
struct State {
    histories: Vec<RepoHistory>,
    snapshots: BTreeMap<String, ForgeSnapshot>,
    identities: IdentityMap,
    cleaning: CleaningReport,
    model_id: String,
    rows: Vec<AuthorProjectRow>,
    tables: BTreeMap<String, (Table, String)>,
    repos: Vec<RepoRow>,
    events: Vec<(String, Vec<CommunicationEvent>)>,
    ownership: Vec<(String, Vec<FileOwnership>)>,
    participation: BTreeMap<(String, String), f64>,
    cps: Option<CpsTable>,
    models: Vec<ModelEntry>,
    warnings: Vec<String>,
}

/// Mines the given clones. Repositories that fail are skipped with a
/// warning when `keep_going` is set.
pub fn mine_repos(
    paths: &[PathBuf],
    opts: &IngestOptions,
    keep_going: bool,
    warnings: &mut Vec<String>,
) -> Result<Vec<RepoHistory>, PipelineError> {
    let mut out: Vec<RepoHistory> = Vec::new();
    for p in paths {
        match walk_history(p, opts) {
            Ok(h) => {
                if out.iter().any(|o| o.project_name == h.project_name) {
                    return Err(PipelineError::Validation(format!(
                        "two repositories are named `{}`",
                        h.project_name
                    )));
                }
                out.push(h);
            }
            Err(e) if keep_going => warnings.push(format!("skipped {}: {e}", p.display())),
            Err(e) => {
                return Err(PipelineError::Ingest {
                    repo: p.display().to_string(),
                    source: e,
                })
            }
        }
    }
    out.sort_by(|a, b| a.project_name.cmp(&b.project_name));
    Ok(out)
}

fn data_through(histories: &[RepoHistory]) -> Option<String> {
    histories.iter().map(|h| h.last_commit_at).max().map(|t| format_iso(&t))
}

fn write_commits(stage: &mut Staging, histories: &[RepoHistory], bug: &BugFixMatcher) -> Result<(), PipelineError> {
    for h in histories {
        stage.write_csv(&format!("commits/{}.csv", h.project_name), |b| write_commits_csv(b, &[h], bug))?;
    }
    let refs: Vec<&RepoHistory> = histories.iter().collect();
    stage.write_csv("commits.csv", |b| write_commits_csv(b, &refs, bug))?;
    Ok(())
}

/// `spacex mine`: per-repository and combined commit datasets.
pub fn cmd_mine(repos: &[PathBuf], out: &Path, opts: &IngestOptions, keep_going: bool) -> Result<RunOutcome, PipelineError> {
    if repos.is_empty() {
        return Err(PipelineError::Input("no repositories given".into()));
    }
    let mut warnings = Vec::new();
    let mut stage = Staging::new(out)?;
    let result = (|| {
        let histories = mine_repos(repos, opts, keep_going, &mut warnings)?;
        write_commits(&mut stage, &histories, &BugFixMatcher::default())?;
        Ok(histories)
    })();
    match result {
        Ok(histories) => {
            let mut m = Manifest::new("mine");
            m.data_through = data_through(&histories);
            let manifest = stage.commit(m)?;
            Ok(RunOutcome {
                out_dir: out.to_path_buf(),
                manifest,
                warnings,
            })
        }
        Err(e) => {
            stage.abandon(&e);
            Err(e)
        }
    }
}

/// Runs the configured pipeline through `opts.through`.
pub fn run(cfg: &LoadedConfig, opts: &RunOptions) -> Result<RunOutcome, PipelineError> {
    cfg.validate()?;
    let out = opts
        .out_dir
        .clone()
        .unwrap_or_else(|| cfg.resolve(&cfg.config.out_dir));
    let mut stage = Staging::new(&out)?;
    let mut state = State::default();
    match execute(cfg, opts, &mut stage, &mut state) {
        Ok(()) => {
            let mut m = Manifest::new(opts.through.command());
            m.config_sha256 = Some(cfg.sha256.clone());
            m.data_through = data_through(&state.histories);
            let manifest = stage.commit(m)?;
            Ok(RunOutcome {
                out_dir: out,
                manifest,
                warnings: state.warnings,
            })
        }
        Err(e) => {
            stage.abandon(&e);
            Err(e)
        }
    }
}

fn execute(cfg: &LoadedConfig, opts: &RunOptions, out: &mut Staging, st: &mut State) -> Result<(), PipelineError> {
    let c = &cfg.config;
    if c.repo_paths.is_empty() {
        return Err(PipelineError::Input("config lists no repo_paths".into()));
    }
    let bug = BugFixMatcher::new(c.ingest.bug_keywords.iter());
    let ingest = IngestOptions {
        project_name: None,
        include_merges: c.ingest.include_merges,
        follow_renames: c.ingest.follow_renames,
    };
    let repo_paths: Vec<PathBuf> = c.repo_paths.iter().map(|p| cfg.resolve(p)).collect();
    st.histories = mine_repos(&repo_paths, &ingest, opts.keep_going, &mut st.warnings)?;
    if st.histories.is_empty() {
        return Err(PipelineError::Input("no repository could be mined".into()));
    }
    write_commits(out, &st.histories, &bug)?;
    out.write("config.toml", cfg.source.as_bytes())?;
    if opts.through == Stage::Mine {
        return Ok(());
    }

    clean_identities(cfg, out, st)?;
    if opts.through == Stage::Clean {
        out.write_json("cleaning_report.json", &st.cleaning)?;
        return Ok(());
    }

    compute_metrics(cfg, out, st, &bug)?;
    if opts.through >= Stage::Cps {
        compute_cps(cfg, out, st)?;
    }
    if opts.through == Stage::Analyze {
        run_models(cfg, out, st)?;
        let bundle = bundle::assemble(cfg, st_view(st));
        out.write_json("bundle.json", &bundle)?;
    }
    Ok(())
}

fn st_view(st: &State) -> bundle::StateView<'_> {
    bundle::StateView {
        histories: &st.histories,
        cleaning: &st.cleaning,
        model_id: &st.model_id,
        tables: &st.tables,
        repos: &st.repos,
        events: &st.events,
        ownership: &st.ownership,
        cps: st.cps.as_ref(),
        models: &st.models,
        warnings: &st.warnings,
    }
}

fn clean_identities(cfg: &LoadedConfig, out: &mut Staging, st: &mut State) -> Result<(), PipelineError> {
    let c = &cfg.config;
    for p in &c.snapshot_paths {
        let path = cfg.resolve(p);
        let snap = load_snapshot(&path).map_err(|e| PipelineError::Forge {
            path: path.display().to_string(),
            source: e,
        })?;
        if !st.histories.iter().any(|h| h.project_name == snap.project_name) {
            st.warnings.push(format!(
                "snapshot {} names project `{}` with no mined repository; ignored",
                path.display(),
                snap.project_name
            ));
            continue;
        }
        if st.snapshots.insert(snap.project_name.clone(), snap).is_some() {
            return Err(PipelineError::Validation(format!(
                "two snapshots for one project ({})",
                path.display()
            )));
        }
    }
    for h in &st.histories {
        if !st.snapshots.contains_key(&h.project_name) {
            st.warnings.push(format!("no forge snapshot for `{}`; forge metrics are empty", h.project_name));
            st.snapshots.insert(h.project_name.clone(), ForgeSnapshot::empty(h.project_name.clone()));
        }
    }

    let overrides = match &c.cleaning.alias_overrides_path {
        Some(p) => {
            let path = cfg.resolve(p);
            let text = std::fs::read_to_string(&path).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
            AliasOverrides::from_csv(&text).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?
        }
        None => AliasOverrides::default(),
    };
    let all: Vec<_> = st.histories.iter().flat_map(|h| h.commits.iter().cloned()).collect();
    let (map, mut report) = dealias(&all, &overrides);
    let (map, bots) = filter_bots(map, &c.cleaning.bot_patterns);
    report.absorb(bots);
    report = report
        .with_parameter("dealias", "union-find over lowercased email and normalized name (lowercase, NFD diacritics stripped, whitespace collapsed)")
        .with_parameter("bot_patterns", serde_json::to_value(&c.cleaning.bot_patterns).unwrap_or_default())
        .with_parameter("alias_overrides", overrides.by_email.len());
    st.identities = map;
    st.cleaning = report;

    let mut raw: Vec<(String, String)> = all
        .iter()
        .map(|c| (c.author_name.clone(), c.author_email.clone()))
        .collect();
    raw.sort();
    raw.dedup();
    let ids = &st.identities;
    out.write_csv("identities.csv", |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["raw_name", "raw_email", "canonical_id", "display_name", "status"])?;
        for (name, email) in &raw {
            let r = crate::identity::RawIdentity::new(name.clone(), email.clone());
            let (id, display, status) = match ids.resolve(&r) {
                Some(i) => (i.canonical_id.clone(), i.display_name.clone(), "kept"),
                None => (String::new(), String::new(), "bot"),
            };
            w.write_record([name.as_str(), email.as_str(), &id, &display, status])?;
        }
        w.flush()?;
        Ok(())
    })?;
    Ok(())
}

fn classifier(cfg: &LoadedConfig) -> Result<Box<dyn SentimentClassifier>, PipelineError> {
    let s = &cfg.config.sentiment;
    Ok(match s.mode {
        SentimentMode::Lexicon => Box::new(LexiconClassifier::default()),
        SentimentMode::External => {
            let cmd = s.external_cmd.as_deref().unwrap_or_default();
            let id = s.model_id.clone().unwrap_or_else(|| format!("external:{cmd}"));
            Box::new(
                ExternalClassifier::from_command_line(cmd, id)
                    .ok_or_else(|| PipelineError::Validation("sentiment.external_cmd is empty".into()))?,
            )
        }
    })
}

/// Serializes a table with integer rendering for whole-valued count
/// columns.
fn write_table_csv(out: &mut Staging, rel: &str, table: &Table, header: &[&str]) -> Result<String, PipelineError> {
    const COUNTS: [&str; 9] = [
        "total_commits",
        "code_churn",
        "bug_fix_commits",
        "total_issues",
        "total_prs",
        "total_code_reviews",
        "total_deployments",
        "cif",
        "lines",
    ];
    out.write_csv(rel, |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(header)?;
        for row in 0..table.n_rows() {
            let rec: Vec<String> = header
                .iter()
                .map(|h| {
                    if let Some(l) = table.label(h) {
                        return l[row].clone();
                    }
                    match table.column(h).and_then(|c| c.get(row)) {
                        Some(v) if COUNTS.contains(h) && v.fract() == 0.0 && v.abs() < 1e15 => format!("{}", v as i64),
                        Some(v) => crate::format::fixed(v),
                        None => String::new(),
                    }
                })
                .collect();
            w.write_record(rec)?;
        }
        w.flush()?;
        Ok(())
    })
}

fn compute_metrics(cfg: &LoadedConfig, out: &mut Staging, st: &mut State, bug: &BugFixMatcher) -> Result<(), PipelineError> {
    let c = &cfg.config;
    let clf = classifier(cfg)?;
    st.model_id = clf.model_id().to_string();
    let mopts = MetricsOptions {
        include_merges: c.ingest.include_merges,
        bug_fix: bug.clone(),
        bot_patterns: c.cleaning.bot_patterns.clone(),
    };
    let cif_opts = CifOptions {
        window_hours: c.communication.window_hours,
        strict_alternation: c.communication.strict_alternation,
    };

    let mut rows = Vec::new();
    let mut forge_only = Vec::new();
    let mut totals: Vec<ProjectTotals> = Vec::new();
    for h in &st.histories {
        let messages: Vec<&str> = h.commits.iter().map(|c| c.message.as_str()).collect();
        let labels = clf.classify_all(&messages).map_err(|e| PipelineError::stage("sentiment", e))?;
        let snap = &st.snapshots[&h.project_name];
        let built = build_author_rows(h, snap, &labels, &st.identities, &mopts)
            .map_err(|e| PipelineError::stage("metrics", e))?;
        rows.extend(built.rows);
        forge_only.extend(built.forge_only);
        totals.push(built.totals);
        st.repos.push(built.repo);

        let ownership = contributor_experience(h, &st.identities);
        let cif = commit_interaction_frequency(h, &st.identities, cif_opts);
        for (id, p) in participation(h, &cif.events, |c| author_of(&st.identities, c)) {
            st.participation.insert((h.project_name.clone(), id), p);
        }
        st.events.push((h.project_name.clone(), cif.events));
        st.ownership.push((h.project_name.clone(), ownership));
    }
    if c.metrics.issues_prs_scope == IssueScope::Project {
        apply_project_scope(&mut rows, &totals);
    }

    out.write_csv("datasets/authors_raw.csv", |b| write_author_csv(b, &rows))?;
    let raw_table = author_table(&rows);
    let raw_sha = crate::pipeline::output::sha256_hex(&{
        let mut b = Vec::new();
        write_author_csv(&mut b, &rows).map_err(|e| PipelineError::stage("metrics", e))?;
        b
    });
    st.tables.insert("authors_raw".into(), (raw_table, raw_sha));

    let (kept, low) = filter_low_activity(rows, c.cleaning.min_commits);
    st.cleaning.absorb(low);
    let mut authors = author_table(&kept);
    let mut repos = repo_table(&st.repos);
    for w in &c.cleaning.winsorize {
        let target = if w.dataset == "authors" { &mut authors } else { &mut repos };
        let rep = winsorize_column(target, &w.column, w.lower, w.upper).map_err(|e| PipelineError::stage("cleaning", e))?;
        st.cleaning.absorb(rep);
    }
    let (efficiency, iqr) =
        iqr_filter(&authors, &c.cleaning.iqr_columns, c.cleaning.iqr_multiplier).map_err(|e| PipelineError::stage("cleaning", e))?;
    st.cleaning.absorb(iqr);
    st.cleaning.parameters.insert(
        "scope".into(),
        serde_json::json!({
            "low_activity": "authors",
            "winsorize": c.cleaning.winsorize.iter().map(|w| format!("{}.{}", w.dataset, w.column)).collect::<Vec<_>>(),
            "iqr": "efficiency dataset only",
        }),
    );
    st.rows = kept;

    let author_header = crate::metrics::AUTHOR_HEADER;
    let sha = write_table_csv(out, "datasets/authors.csv", &authors, &author_header)?;
    st.tables.insert("authors".into(), (authors, sha));
    let sha = write_table_csv(out, "datasets/efficiency.csv", &efficiency, &author_header)?;
    st.tables.insert("efficiency".into(), (efficiency, sha));
    let sha = out.write_csv("datasets/repos_raw.csv", |b| write_repo_csv(b, &st.repos))?;
    st.tables.insert("repos_raw".into(), (repo_table(&st.repos), sha));
    let sha = write_table_csv(out, "datasets/repos.csv", &repos, &crate::metrics::REPO_HEADER)?;
    st.tables.insert("repos".into(), (repos, sha));
    out.write_csv("datasets/forge_only_authors.csv", |b| write_forge_only_csv(b, &forge_only))?;
    out.write_csv("datasets/project_totals.csv", |b| write_totals_csv(b, &totals))?;

    let files = files_table(&st.ownership, &st.events);
    let sha = write_table_csv(
        out,
        "datasets/files.csv",
        &files,
        &["project", "path", "top_share_pct", "cif", "mean_event_gap_hours", "lines"],
    )?;
    st.tables.insert("files".into(), (files, sha));

    let ev: Vec<(&str, &[CommunicationEvent])> =
        st.events.iter().map(|(p, e)| (p.as_str(), e.as_slice())).collect();
    out.write_csv("communication/events.csv", |b| write_events_csv(b, &ev))?;
    let own: Vec<(&str, &[FileOwnership])> =
        st.ownership.iter().map(|(p, o)| (p.as_str(), o.as_slice())).collect();
    out.write_csv("communication/ownership.csv", |b| write_ownership_csv(b, &own))?;
    let all_events: Vec<CommunicationEvent> = st.events.iter().flat_map(|(_, e)| e.iter().cloned()).collect();
    let pairs = pair_summary(&all_events);
    out.write_csv("communication/pairs.csv", |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["author_a", "author_b", "events"])?;
        for p in &pairs {
            w.write_record([p.author_a.as_str(), p.author_b.as_str(), &p.events.to_string()])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let hist = time_diff_stats(&all_events).map(|s| s.histogram).unwrap_or_else(|| vec![0; 24]);
    out.write_csv("communication/time_diff_histogram.csv", |b| write_histogram_csv(b, &hist))?;
    st.cleaning.parameters.insert("sentiment_model".into(), st.model_id.clone().into());
    out.write_json("cleaning_report.json", &st.cleaning)?;
    Ok(())
}

fn files_table(ownership: &[(String, Vec<FileOwnership>)], events: &[(String, Vec<CommunicationEvent>)]) -> Table {
    let mut t = Table::new("files");
    let mut projects = Vec::new();
    let mut paths = Vec::new();
    let mut share = Vec::new();
    let mut cif = Vec::new();
    let mut gap = Vec::new();
    let mut lines = Vec::new();
    for (project, files) in ownership {
        let evs = events.iter().find(|(p, _)| p == project).map(|(_, e)| e.as_slice()).unwrap_or(&[]);
        let mut per_file: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
        for e in evs {
            let s = per_file.entry(e.path.as_str()).or_default();
            s.0 += 1;
            s.1 += e.gap_hours;
        }
        for f in files {
            projects.push(project.clone());
            paths.push(f.path.clone());
            share.push(f.top_share_pct);
            let (n, sum) = per_file.get(f.path.as_str()).copied().unwrap_or((0, 0.0));
            cif.push(n as f64);
            gap.push((n > 0).then(|| sum / n as f64));
            lines.push(f.line_count_by_author.values().sum::<u64>() as f64);
        }
    }
    t.labels.push(("project".into(), projects));
    t.labels.push(("path".into(), paths));
    t.columns.push(spacex_stats::DataColumn::new("top_share_pct", share));
    t.columns.push(spacex_stats::DataColumn::new("cif", cif));
    t.columns.push(spacex_stats::DataColumn::with_missing("mean_event_gap_hours", gap));
    t.columns.push(spacex_stats::DataColumn::new("lines", lines));
    t
}

fn compute_cps(cfg: &LoadedConfig, out: &mut Staging, st: &mut State) -> Result<(), PipelineError> {
    let c = &cfg.config.cps;
    let profile = ScoringProfile {
        activity_churn_share: c.activity_churn_share,
    };
    let table = score_population(&st.rows, &st.participation, &WeightVector(c.weights), &profile)
        .map_err(|e| PipelineError::stage("cps", e))?;
    for w in &table.warnings {
        st.warnings.push(format!("cps: {w}"));
    }
    out.write_csv("cps.csv", |b| write_cps_csv(b, &table.rows))?;
    st.cps = Some(table);
    Ok(())
}

fn run_models(cfg: &LoadedConfig, out: &mut Staging, st: &mut State) -> Result<(), PipelineError> {
    for spec in &cfg.config.analyses {
        let (table, sha) = st
            .tables
            .get(&spec.dataset)
            .ok_or_else(|| PipelineError::Validation(format!("unknown dataset `{}`", spec.dataset)))?;
        let stage_name = "models";
        let output = run_analysis(spec, table).map_err(|e| PipelineError::Stage {
            stage: stage_name,
            message: format!("analysis `{}`: {e}", spec.name),
        })?;
        let file = format!("models/{}.json", spec.name);
        let mut residuals_file = None;
        if let AnalysisResult::Model(rep) = &output.result {
            if !rep.residuals.is_empty() {
                let rel = format!("models/{}_residuals.csv", spec.name);
                let rows = output.residual_rows.clone();
                let res = rep.residuals.clone();
                out.write_csv(&rel, |b| {
                    let mut w = csv::Writer::from_writer(b);
                    w.write_record(["row_index", "residual"])?;
                    for (i, r) in rows.iter().zip(&res) {
                        w.write_record([i.to_string(), format!("{:.12e}", r)])?;
                    }
                    w.flush()?;
                    Ok(())
                })?;
                residuals_file = Some(rel);
            }
        }
        let entry = ModelEntry {
            name: spec.name.clone(),
            kind: spec.kind,
            dataset: spec.dataset.clone(),
            dataset_sha256: sha.clone(),
            file: file.clone(),
            residuals_file,
            spec: spec.clone(),
            result: output.result,
        };
        out.write_json(&file, &entry)?;
        st.models.push(entry);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(PipelineError::Input("x".into()).exit_code(), 2);
        assert_eq!(PipelineError::Validation("x".into()).exit_code(), 1);
        assert_eq!(PipelineError::stage("models", "boom").exit_code(), 1);
        assert_eq!(
            PipelineError::MissingArtifact {
                missing: vec!["a".into()],
                modified: vec![]
            }
            .to_string(),
            "bundle is incomplete: missing [a], modified []"
        );
    }
}
