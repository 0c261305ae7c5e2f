use std::fs;

use spacex_core::fixtures::{generate_corpus, DEFAULT_SEED};
use spacex_core::pipeline::{cmd_report, run, LoadedConfig, Manifest, PipelineError, RunOptions, Stage};

fn full_run(dir: &std::path::Path) -> Manifest {
    let corpus = generate_corpus(&dir.join("corpus"), DEFAULT_SEED).unwrap();
    let cfg = LoadedConfig::load(&corpus.config_path).unwrap();
    let out = dir.join("out");
    let outcome = run(
        &cfg,
        &RunOptions {
            out_dir: Some(out.clone()),
            keep_going: false,
            through: Stage::Analyze,
        },
    )
    .unwrap();
    cmd_report(&out).unwrap();
    assert!(outcome.manifest.files.iter().any(|f| f.path == "bundle.json"));
    Manifest::load(&out).unwrap()
}

#[test]
fn corpus_runs_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = full_run(tmp.path());
    let out = tmp.path().join("out");
    for f in [
        "commits.csv",
        "identities.csv",
        "datasets/authors.csv",
        "datasets/efficiency.csv",
        "datasets/repos.csv",
        "datasets/files.csv",
        "communication/events.csv",
        "models/satisfaction_poisson.json",
        "cps.csv",
        "report.md",
    ] {
        assert!(manifest.files.iter().any(|e| e.path == f), "{f} missing from manifest");
    }
    let (missing, modified) = manifest.verify(&out);
    assert!(missing.is_empty() && modified.is_empty());
    assert!(!out.join(".partial").exists());
    let report = fs::read_to_string(out.join("report.md")).unwrap();
    assert!(report.contains("## Composite score"));
    assert!(report.contains(" / "));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(full_run(a.path()).files, full_run(b.path()).files);
}

#[test]
fn report_refuses_tampered_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    full_run(tmp.path());
    let out = tmp.path().join("out");
    fs::write(out.join("cps.csv"), "tampered\n").unwrap();
    fs::remove_file(out.join("datasets/files.csv")).unwrap();
    match cmd_report(&out) {
        Err(e @ PipelineError::MissingArtifact { .. }) => {
            assert_eq!(e.exit_code(), 2);
            let PipelineError::MissingArtifact { missing, modified } = e else { unreachable!() };
            assert_eq!(missing, vec!["datasets/files.csv".to_string()]);
            assert_eq!(modified, vec!["cps.csv".to_string()]);
        }
        other => panic!("expected missing artifact, got {other:?}"),
    }
}

#[test]
fn failed_run_leaves_previous_bundle_untouched() {
    let tmp = tempfile::tempdir().unwrap();
    let before = full_run(tmp.path());
    let corpus = tmp.path().join("corpus");
    let mut cfg = LoadedConfig::load(&corpus.join("spacex.toml")).unwrap();
    cfg.config.analyses[0].predictors.push("total_prs".into());
    cfg.config.analyses[0].predictors.push("total_prs".into());
    let out = tmp.path().join("out");
    let err = run(
        &cfg,
        &RunOptions {
            out_dir: Some(out.clone()),
            keep_going: false,
            through: Stage::Analyze,
        },
    );
    assert!(err.is_err());
    let after = Manifest::load(&out).unwrap();
    assert_eq!(before, after);
    let (missing, modified) = after.verify(&out);
    assert!(missing.is_empty() && modified.is_empty());
    assert!(out.join(".partial/ERROR.txt").exists());
}
