use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use spacex_core::fixtures::{generate_corpus, DEFAULT_SEED};
use spacex_core::forge::{fetch_live, load_snapshot, FetchOptions, ForgeError};
use spacex_core::identity::{AliasOverrides, BotPatterns};
use spacex_core::ingest::{IngestError, IngestOptions};
use spacex_core::pipeline::{
    cmd_mine, cmd_report, mine_repos, run, select_projects, write_selection_csv, LoadedConfig, PipelineError,
    RunOptions, RunOutcome, Stage,
};
use spacex_core::time::parse_iso;

/// Mine git histories and forge snapshots into SPACE-dimension metrics,
/// statistical models and a composite score.
#[derive(Debug, Parser)]
#[command(name = "spacex", version)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out_dir` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Skip repositories that cannot be mined instead of failing.
    #[arg(long, global = true)]
    keep_going: bool,
    /// Seed for `fixtures`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Export commit datasets, from the given clones or the config.
    Mine { repos: Vec<PathBuf> },
    /// Download pull requests, issues and CI runs into a snapshot file.
    ForgeFetch {
        /// `owner/repo`
        slug: String,
        /// Snapshot path; defaults to `<out>/<repo>.json`.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "https://api.github.com")]
        api_base: String,
        #[arg(long)]
        project: Option<String>,
        #[arg(long, default_value_t = 100)]
        per_page: usize,
    },
    /// Check snapshot files against the schema.
    ForgeValidate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Mine and resolve identities.
    Clean,
    /// Mine, clean and compute every dataset.
    Metrics,
    /// Metrics plus composite scores.
    Cps,
    /// The full pipeline: metrics, composite scores and configured models.
    Analyze,
    /// Render report.md from a finished bundle.
    Report { dir: Option<PathBuf> },
    /// Write the synthetic three-repository corpus.
    Fixtures { dir: Option<PathBuf> },
    /// Apply the team-size and steady-activity filters to clones.
    Select {
        repos: Vec<PathBuf>,
        /// Reference date (RFC 3339); defaults to each repository's last commit.
        #[arg(long)]
        as_of: Option<String>,
    },
}

fn load_config(cli: &Cli) -> Result<LoadedConfig> {
    let Some(path) = &cli.config else {
        return Err(PipelineError::Input("this command needs --config".into()).into());
    };
    Ok(LoadedConfig::load(path)?)
}

fn out_dir(cli: &Cli, cfg: Option<&LoadedConfig>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.map(|c| c.resolve(&c.config.out_dir)))
        .unwrap_or_else(|| PathBuf::from("spacex-out"))
}

fn summarize(outcome: &RunOutcome) {
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{}: {} files, manifest {}",
        outcome.out_dir.display(),
        outcome.manifest.files.len(),
        &outcome.manifest.digest()[..16]
    );
}

fn stage(cli: &Cli, through: Stage) -> Result<()> {
    let cfg = load_config(cli)?;
    let outcome = run(
        &cfg,
        &RunOptions {
            out_dir: cli.out.clone(),
            keep_going: cli.keep_going,
            through,
        },
    )?;
    summarize(&outcome);
    Ok(())
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Mine { repos } if !repos.is_empty() => {
            let outcome = cmd_mine(repos, &out_dir(cli, None), &IngestOptions::default(), cli.keep_going)?;
            summarize(&outcome);
        }
        Command::Mine { .. } => stage(cli, Stage::Mine)?,
        Command::Clean => stage(cli, Stage::Clean)?,
        Command::Metrics => stage(cli, Stage::Metrics)?,
        Command::Cps => stage(cli, Stage::Cps)?,
        Command::Analyze => stage(cli, Stage::Analyze)?,
        Command::Report { dir } => {
            let dir = match dir {
                Some(d) => d.clone(),
                None if cli.out.is_some() || cli.config.is_none() => out_dir(cli, None),
                None => out_dir(cli, Some(&load_config(cli)?)),
            };
            let outcome = cmd_report(&dir)?;
            summarize(&outcome);
            println!("{}", dir.join("report.md").display());
        }
        Command::ForgeFetch {
            slug,
            output,
            api_base,
            project,
            per_page,
        } => {
            let repo = slug.rsplit('/').next().unwrap_or(slug);
            let path = output
                .clone()
                .unwrap_or_else(|| cli.out.clone().unwrap_or_else(|| PathBuf::from(".")).join(format!("{repo}.json")));
            let mut opts = FetchOptions::new(&path);
            opts.api_base = api_base.clone();
            opts.project_name = project.clone();
            opts.per_page = (*per_page).max(1);
            let snap = fetch_live(slug, &opts)?;
            println!(
                "{}: {} pull requests, {} issues, {} CI runs",
                path.display(),
                snap.pull_requests.len(),
                snap.issues.len(),
                snap.ci_runs.len()
            );
        }
        Command::ForgeValidate { files } => {
            let mut failed = None;
            for f in files {
                match load_snapshot(f) {
                    Ok(s) => println!(
                        "{}: ok ({}; {} pull requests, {} issues, {} CI runs)",
                        f.display(),
                        s.project_name,
                        s.pull_requests.len(),
                        s.issues.len(),
                        s.ci_runs.len()
                    ),
                    Err(e) => {
                        eprintln!("{}: {e}", f.display());
                        failed.get_or_insert(e);
                    }
                }
            }
            if let Some(e) = failed {
                return Err(e).context("snapshot validation failed");
            }
        }
        Command::Fixtures { dir } => {
            let dir = dir.clone().or_else(|| cli.out.clone()).unwrap_or_else(|| PathBuf::from("spacex-fixtures"));
            let corpus = generate_corpus(&dir, cli.seed.unwrap_or(DEFAULT_SEED))?;
            for p in corpus.repo_paths.iter().chain(&corpus.snapshot_paths) {
                println!("{}", p.display());
            }
            println!("{}", corpus.config_path.display());
        }
        Command::Select { repos, as_of } => select(cli, repos, as_of.as_deref())?,
    }
    Ok(())
}

fn select(cli: &Cli, repos: &[PathBuf], as_of: Option<&str>) -> Result<()> {
    let as_of = match as_of {
        Some(s) => Some(parse_iso(s).map_err(|e| PipelineError::Input(format!("--as-of {s:?}: {e}")))?),
        None => None,
    };
    let cfg = match &cli.config {
        Some(_) => Some(load_config(cli)?),
        None => None,
    };
    let paths: Vec<PathBuf> = if !repos.is_empty() {
        repos.to_vec()
    } else if let Some(c) = &cfg {
        c.config.repo_paths.iter().map(|p| c.resolve(p)).collect()
    } else {
        bail!(PipelineError::Input("give repositories or --config".into()));
    };
    let (overrides, bots) = match &cfg {
        Some(c) => {
            let overrides = match &c.config.cleaning.alias_overrides_path {
                Some(p) => read_overrides(&c.resolve(p))?,
                None => AliasOverrides::default(),
            };
            (overrides, c.config.cleaning.bot_patterns.clone())
        }
        None => (AliasOverrides::default(), BotPatterns::default()),
    };
    let mut warnings = Vec::new();
    let histories = mine_repos(&paths, &IngestOptions::default(), cli.keep_going, &mut warnings)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let rows = select_projects(&histories, &overrides, &bots, as_of);
    let mut buf = Vec::new();
    write_selection_csv(&mut buf, &rows)?;
    std::io::stdout().write_all(&buf)?;
    Ok(())
}

fn read_overrides(path: &Path) -> Result<AliasOverrides> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
    Ok(AliasOverrides::from_csv(&text).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?)
}

/// 2 for unusable inputs, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<PipelineError>() {
            return e.exit_code() as u8;
        }
        if cause.is::<ForgeError>() || cause.is::<IngestError>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
