//! Run configuration: one TOML file holding every pipeline parameter.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::cps::WeightVector;
use crate::identity::BotPatterns;
use crate::ingest::DEFAULT_BUG_KEYWORDS;
use crate::metrics::IssueScope;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub repo_paths: Vec<PathBuf>,
    pub snapshot_paths: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub ingest: IngestConfig,
    pub cleaning: CleaningConfig,
    pub sentiment: SentimentConfig,
    pub metrics: MetricsConfig,
    pub communication: CommunicationConfig,
    pub analyses: Vec<AnalysisSpec>,
    pub cps: CpsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            repo_paths: Vec::new(),
            snapshot_paths: Vec::new(),
            out_dir: PathBuf::from("spacex-out"),
            ingest: IngestConfig::default(),
            cleaning: CleaningConfig::default(),
            sentiment: SentimentConfig::default(),
            metrics: MetricsConfig::default(),
            communication: CommunicationConfig::default(),
            analyses: Vec::new(),
            cps: CpsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub include_merges: bool,
    pub follow_renames: bool,
    pub bug_keywords: Vec<String>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            include_merges: false,
            follow_renames: false,
            bug_keywords: DEFAULT_BUG_KEYWORDS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WinsorizeSpec {
    pub dataset: String,
    pub column: String,
    #[serde(default = "default_lower")]
    pub lower: f64,
    #[serde(default = "default_upper")]
    pub upper: f64,
}

fn default_lower() -> f64 {
    0.01
}

fn default_upper() -> f64 {
    0.99
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleaningConfig {
    pub min_commits: u64,
    /// Columns of the efficiency dataset screened with Tukey fences.
    pub iqr_columns: Vec<String>,
    pub iqr_multiplier: f64,
    pub winsorize: Vec<WinsorizeSpec>,
    pub bot_patterns: BotPatterns,
    pub alias_overrides_path: Option<PathBuf>,
}

pub const EFFICIENCY_COLUMNS: [&str; 5] = [
    "mean_commit_gap_hours",
    "total_commits",
    "avg_daily_commits",
    "code_churn",
    "avg_daily_churn",
];

impl Default for CleaningConfig {
    fn default() -> Self {
        Self {
            min_commits: crate::cleaning::DEFAULT_MIN_COMMITS,
            iqr_columns: EFFICIENCY_COLUMNS.iter().map(|s| s.to_string()).collect(),
            iqr_multiplier: crate::cleaning::DEFAULT_IQR_MULTIPLIER,
            winsorize: vec![WinsorizeSpec {
                dataset: "repos".into(),
                column: "avg_pr_merge_time_hours".into(),
                lower: default_lower(),
                upper: default_upper(),
            }],
            bot_patterns: BotPatterns::default(),
            alias_overrides_path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentMode {
    #[default]
    Lexicon,
    External,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SentimentConfig {
    pub mode: SentimentMode,
    pub external_cmd: Option<String>,
    /// Recorded in outputs for the external classifier.
    pub model_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub issues_prs_scope: IssueScope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommunicationConfig {
    pub window_hours: f64,
    pub strict_alternation: bool,
}

impl Default for CommunicationConfig {
    fn default() -> Self {
        Self {
            window_hours: 24.0,
            strict_alternation: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisKind {
    Pearson,
    Ols,
    PartialCorr,
    Poisson,
    Vif,
    CorrelationMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformOp {
    Zscore,
    Log1p,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSpec {
    pub column: String,
    pub op: TransformOp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    pub name: String,
    pub kind: AnalysisKind,
    pub dataset: String,
    #[serde(default)]
    pub response: Option<String>,
    #[serde(default)]
    pub predictors: Vec<String>,
    #[serde(default)]
    pub controls: Vec<String>,
    #[serde(default)]
    pub columns: Vec<String>,
    #[serde(default)]
    pub transforms: Vec<TransformSpec>,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default = "yes")]
    pub intercept: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CpsConfig {
    pub weights: [f64; 5],
    pub scoring_profile: String,
    pub activity_churn_share: f64,
}

impl Default for CpsConfig {
    fn default() -> Self {
        Self {
            weights: WeightVector::default().0,
            scoring_profile: "default".into(),
            activity_churn_share: 0.5,
        }
    }
}

/// Dataset names and the columns each one offers.
pub fn dataset_columns(dataset: &str) -> Option<(Vec<&'static str>, Vec<&'static str>)> {
    let authors = || {
        (
            vec!["project", "author"],
            crate::metrics::AUTHOR_HEADER[2..].to_vec(),
        )
    };
    match dataset {
        "authors" | "authors_raw" | "efficiency" => Some(authors()),
        "repos" | "repos_raw" => Some((vec!["project"], crate::metrics::REPO_HEADER[1..].to_vec())),
        "files" => Some((
            vec!["project", "path"],
            vec!["top_share_pct", "cif", "mean_event_gap_hours", "lines"],
        )),
        _ => None,
    }
}

/// A parsed configuration with paths resolved against its directory.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub base_dir: PathBuf,
    pub sha256: String,
    pub source: String,
}

impl LoadedConfig {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn from_str(source: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let config: RunConfig =
            toml::from_str(source).map_err(|e| PipelineError::Validation(format!("config: {}", e.message())))?;
        Ok(Self {
            config,
            base_dir: base_dir.to_path_buf(),
            sha256: hex::encode(Sha256::digest(source.as_bytes())),
            source: source.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let source = std::fs::read_to_string(path).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_str(&source, &base)
    }

    /// Checks everything that can be checked without touching data.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let c = &self.config;
        for p in c.repo_paths.iter().chain(&c.snapshot_paths) {
            let r = self.resolve(p);
            if !r.exists() {
                return Err(PipelineError::Input(format!("{}: no such file or directory", r.display())));
            }
        }
        if let Some(p) = &c.cleaning.alias_overrides_path {
            if !self.resolve(p).exists() {
                return Err(PipelineError::Input(format!("{}: no such file", self.resolve(p).display())));
            }
        }
        let invalid = |m: String| Err(PipelineError::Validation(m));
        if !(c.cleaning.iqr_multiplier >= 0.0) {
            return invalid("cleaning.iqr_multiplier must be non-negative".into());
        }
        if !(c.communication.window_hours >= 0.0) {
            return invalid("communication.window_hours must be non-negative".into());
        }
        if c.sentiment.mode == SentimentMode::External && c.sentiment.external_cmd.as_deref().map_or(true, |s| s.trim().is_empty()) {
            return invalid("sentiment.external_cmd is required in external mode".into());
        }
        if c.cps.scoring_profile != "default" {
            return invalid(format!("unknown cps.scoring_profile `{}`", c.cps.scoring_profile));
        }
        if !(0.0..=1.0).contains(&c.cps.activity_churn_share) {
            return invalid("cps.activity_churn_share must lie in [0, 1]".into());
        }
        WeightVector(c.cps.weights)
            .validate()
            .map_err(|e| PipelineError::Validation(format!("cps.weights: {e}")))?;
        for col in &c.cleaning.iqr_columns {
            check_column("efficiency", col, "cleaning.iqr_columns")?;
        }
        for w in &c.cleaning.winsorize {
            if !matches!(w.dataset.as_str(), "authors" | "repos") {
                return invalid(format!("winsorize: dataset `{}` must be authors or repos", w.dataset));
            }
            check_numeric(&w.dataset, &w.column, "cleaning.winsorize")?;
            if !(0.0..=1.0).contains(&w.lower) || !(0.0..=1.0).contains(&w.upper) || w.lower >= w.upper {
                return invalid(format!("winsorize {}: need 0 <= lower < upper <= 1", w.column));
            }
        }
        let mut names = BTreeSet::new();
        for a in &c.analyses {
            validate_analysis(a)?;
            if !names.insert(a.name.as_str()) {
                return invalid(format!("duplicate analysis name `{}`", a.name));
            }
        }
        Ok(())
    }
}

fn check_column(dataset: &str, column: &str, what: &str) -> Result<(), PipelineError> {
    let (labels, numeric) =
        dataset_columns(dataset).ok_or_else(|| PipelineError::Validation(format!("{what}: unknown dataset `{dataset}`")))?;
    if labels.contains(&column) || numeric.contains(&column) {
        Ok(())
    } else {
        Err(PipelineError::UnknownColumn {
            context: what.to_string(),
            dataset: dataset.to_string(),
            column: column.to_string(),
        })
    }
}

fn check_numeric(dataset: &str, column: &str, what: &str) -> Result<(), PipelineError> {
    check_column(dataset, column, what)?;
    let (_, numeric) = dataset_columns(dataset).unwrap_or_default();
    if numeric.contains(&column) {
        Ok(())
    } else {
        Err(PipelineError::Validation(format!("{what}: `{column}` is not numeric")))
    }
}

fn validate_analysis(a: &AnalysisSpec) -> Result<(), PipelineError> {
    let ctx = format!("analysis `{}`", a.name);
    let bad = |m: &str| Err(PipelineError::Validation(format!("{ctx}: {m}")));
    if a.name.is_empty() || !a.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return bad("name must be non-empty and use only letters, digits, `_` or `-`");
    }
    if dataset_columns(&a.dataset).is_none() {
        return bad(&format!("unknown dataset `{}`", a.dataset));
    }
    for col in a.response.iter().chain(&a.predictors).chain(&a.controls).chain(&a.columns) {
        check_numeric(&a.dataset, col, &ctx)?;
    }
    for t in &a.transforms {
        check_numeric(&a.dataset, &t.column, &ctx)?;
    }
    if let Some(g) = &a.group {
        check_column(&a.dataset, g, &ctx)?;
        if a.kind != AnalysisKind::Poisson {
            return bad("only poisson models take a group");
        }
    }
    match a.kind {
        AnalysisKind::Pearson if a.response.is_none() || a.predictors.len() != 1 => bad("pearson needs a response and one predictor"),
        AnalysisKind::PartialCorr if a.response.is_none() || a.predictors.len() != 1 => {
            bad("partial_corr needs a response, one predictor and controls")
        }
        AnalysisKind::Ols | AnalysisKind::Poisson if a.response.is_none() => bad("a response is required"),
        AnalysisKind::Vif if a.predictors.len() < 2 => bad("vif needs at least two predictors"),
        AnalysisKind::CorrelationMatrix if a.columns.len() < 2 => bad("correlation_matrix needs at least two columns"),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(src: &str) -> Result<(), PipelineError> {
        LoadedConfig::from_str(src, Path::new("."))?.validate()
    }

    #[test]
    fn defaults_are_valid() {
        load("").unwrap();
        let c = LoadedConfig::from_str("", Path::new(".")).unwrap().config;
        assert_eq!(c.cleaning.min_commits, 20);
        assert_eq!(c.cps.weights, [0.2; 5]);
        assert_eq!(c.communication.window_hours, 24.0);
    }

    #[test]
    fn unknown_column_is_rejected() {
        let err = load(
            r#"
[[analyses]]
name = "m"
kind = "ols"
dataset = "authors"
response = "code_churn"
predictors = ["no_such_column"]
"#,
        )
        .unwrap_err();
        assert!(matches!(err, PipelineError::UnknownColumn { ref column, .. } if column == "no_such_column"));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn unknown_keys_and_missing_paths() {
        assert!(matches!(load("bogus = 1"), Err(PipelineError::Validation(_))));
        let err = load("repo_paths = [\"/definitely/not/here\"]").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
