use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spacex(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spacex"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SPACEX_FORGE_TOKEN")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_repository_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir(tmp.path().join("empty")).unwrap();
    let o = spacex(&["mine", "empty", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error: "));
}

#[test]
fn unknown_column_fails_before_mining() {
    let tmp = tempfile::tempdir().unwrap();
    let o = spacex(&["fixtures", "corpus"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cfg = tmp.path().join("corpus/spacex.toml");
    let text = fs::read_to_string(&cfg).unwrap();
    fs::write(&cfg, text.replacen("response = \"total_commits\"", "response = \"no_such_column\"", 1)).unwrap();

    let o = spacex(&["--config", "corpus/spacex.toml", "analyze"], tmp.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("no_such_column"), "{}", stderr(&o));
    assert!(!tmp.path().join("corpus/out").exists());
}

#[test]
fn report_on_a_directory_without_a_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let o = spacex(&["report", "."], tmp.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn forge_fetch_without_a_token() {
    let tmp = tempfile::tempdir().unwrap();
    let o = spacex(&["forge-fetch", "acme/widgets", "--api-base", "http://127.0.0.1:9"], tmp.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn fixtures_analyze_report() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(spacex(&["fixtures", "c", "--seed", "11"], tmp.path()).status.success());
    let o = spacex(&["--config", "c/spacex.toml", "--out", "bundle", "analyze"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = spacex(&["report", "bundle"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = fs::read_to_string(tmp.path().join("bundle/report.md")).unwrap();
    assert!(report.contains("Composite score"));
}
