//! Synthetic corpora: scripted git repositories written through libgit2
//! and matching forge snapshots, fully determined by a seed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, TimeZone, Utc};
use git2::{Oid, Repository, RepositoryInitOptions, Signature, Time};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::forge::{CiConclusion, CiRun, ExtraColumns, ForgeSnapshot, IssueRecord, IssueState, PullRequest};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error(transparent)]
    Git(#[from] git2::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} exists and is not empty")]
    NotEmpty(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FixtureError + '_ {
    move |source| FixtureError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Full-content changes of one commit: `None` deletes the path.
pub type Changes = BTreeMap<String, Option<Vec<u8>>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Author {
    pub name: String,
    pub email: String,
}

impl Author {
    pub fn new(name: &str, email: &str) -> Self {
        Self {
            name: name.into(),
            email: email.into(),
        }
    }
}

/// Writes commits with explicit authors, timestamps and trees, without a
/// working directory until [`RepoWriter::finish`].
pub struct RepoWriter {
    repo: Repository,
    head: Option<Oid>,
    files: BTreeMap<String, Vec<u8>>,
}

fn write_tree(repo: &Repository, files: &BTreeMap<String, Vec<u8>>) -> Result<Oid, git2::Error> {
    let mut direct: Vec<(&str, &Vec<u8>)> = Vec::new();
    let mut nested: BTreeMap<&str, BTreeMap<String, Vec<u8>>> = BTreeMap::new();
    for (path, data) in files {
        match path.split_once('/') {
            Some((dir, rest)) => {
                nested.entry(dir).or_default().insert(rest.to_string(), data.clone());
            }
            None => direct.push((path, data)),
        }
    }
    let mut tb = repo.treebuilder(None)?;
    for (name, data) in direct {
        let blob = repo.blob(data)?;
        tb.insert(name, blob, 0o100644)?;
    }
    for (dir, sub) in nested {
        let oid = write_tree(repo, &sub)?;
        tb.insert(dir, oid, 0o040000)?;
    }
    tb.write()
}

fn apply(files: &mut BTreeMap<String, Vec<u8>>, changes: &Changes) {
    for (path, content) in changes {
        match content {
            Some(c) => {
                files.insert(path.clone(), c.clone());
            }
            None => {
                files.remove(path);
            }
        }
    }
}

impl RepoWriter {
    pub fn init(path: &Path) -> Result<Self, FixtureError> {
        fs::create_dir_all(path).map_err(io_err(path))?;
        let mut opts = RepositoryInitOptions::new();
        opts.initial_head("main");
        let repo = Repository::init_opts(path, &opts)?;
        Ok(Self {
            repo,
            head: None,
            files: BTreeMap::new(),
        })
    }

    pub fn head(&self) -> Option<Oid> {
        self.head
    }

    pub fn files(&self) -> &BTreeMap<String, Vec<u8>> {
        &self.files
    }

    fn write_commit(
        &self,
        update_ref: Option<&str>,
        author: &Author,
        timestamp: i64,
        message: &str,
        files: &BTreeMap<String, Vec<u8>>,
        parents: &[Oid],
    ) -> Result<Oid, git2::Error> {
        let sig = Signature::new(&author.name, &author.email, &Time::new(timestamp, 0))?;
        let tree = self.repo.find_tree(write_tree(&self.repo, files)?)?;
        let parents = parents
            .iter()
            .map(|p| self.repo.find_commit(*p))
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&git2::Commit> = parents.iter().collect();
        self.repo.commit(update_ref, &sig, &sig, message, &tree, &refs)
    }

    /// Commits on the main line.
    pub fn commit(&mut self, author: &Author, timestamp: i64, message: &str, changes: &Changes) -> Result<Oid, FixtureError> {
        apply(&mut self.files, changes);
        let parents: Vec<Oid> = self.head.into_iter().collect();
        let oid = self.write_commit(Some("HEAD"), author, timestamp, message, &self.files, &parents)?;
        self.head = Some(oid);
        Ok(oid)
    }

    /// Commits on a side line branching from the current head; the main
    /// line does not move.
    pub fn side_commit(&self, author: &Author, timestamp: i64, message: &str, changes: &Changes) -> Result<Oid, FixtureError> {
        let mut files = self.files.clone();
        apply(&mut files, changes);
        let parents: Vec<Oid> = self.head.into_iter().collect();
        Ok(self.write_commit(None, author, timestamp, message, &files, &parents)?)
    }

    /// Merges `other` into the main line; `changes` carries the side line's
    /// edits so the merged tree is well defined.
    pub fn merge(&mut self, other: Oid, author: &Author, timestamp: i64, message: &str, changes: &Changes) -> Result<Oid, FixtureError> {
        apply(&mut self.files, changes);
        let mut parents: Vec<Oid> = self.head.into_iter().collect();
        parents.push(other);
        let oid = self.write_commit(Some("HEAD"), author, timestamp, message, &self.files, &parents)?;
        self.head = Some(oid);
        Ok(oid)
    }

    /// Checks the head out into the working directory.
    pub fn finish(self) -> Result<(), FixtureError> {
        if self.head.is_some() {
            let mut co = git2::build::CheckoutBuilder::new();
            co.force();
            self.repo.checkout_head(Some(&mut co))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lang {
    Rust,
    Python,
    JavaScript,
}

impl Lang {
    fn ext(self) -> &'static str {
        match self {
            Lang::Rust => "rs",
            Lang::Python => "py",
            Lang::JavaScript => "js",
        }
    }

    fn dir(self) -> &'static str {
        match self {
            Lang::Rust => "src",
            Lang::Python => "pkg",
            Lang::JavaScript => "lib",
        }
    }
}

/// A source file modelled as a list of functions, each a list of lines.
#[derive(Debug, Clone, Default)]
struct SourceModel {
    functions: Vec<Vec<String>>,
}

fn function_block(lang: Lang, name: &str, branches: usize, plain: usize, salt: u32) -> Vec<String> {
    let mut body = Vec::new();
    for i in 0..plain {
        body.push(match lang {
            Lang::Rust => format!("    acc = acc.wrapping_add({});", salt + i as u32),
            Lang::Python => format!("    acc = acc + {}", salt + i as u32),
            Lang::JavaScript => format!("  acc = acc + {};", salt + i as u32),
        });
    }
    for i in 0..branches {
        let k = salt + 100 + i as u32;
        match (lang, i % 3) {
            (Lang::Rust, 0) => body.push(format!("    if acc > {k} {{ acc -= 1; }}")),
            (Lang::Rust, 1) => body.push(format!("    while acc > {k} {{ acc /= 2; }}")),
            (Lang::Rust, _) => body.push(format!("    if acc < {k} && x > 0 {{ acc += x; }}")),
            (Lang::Python, 0) => {
                body.push(format!("    if acc > {k}:"));
                body.push("        acc -= 1".into());
            }
            (Lang::Python, 1) => {
                body.push(format!("    while acc > {k}:"));
                body.push("        acc //= 2".into());
            }
            (Lang::Python, _) => {
                body.push(format!("    if acc < {k} and x > 0:"));
                body.push("        acc += x".into());
            }
            (Lang::JavaScript, 0) => body.push(format!("  if (acc > {k}) {{ acc -= 1; }}")),
            (Lang::JavaScript, 1) => body.push(format!("  for (let i = 0; i < {k}; i++) {{ acc ^= i; }}")),
            (Lang::JavaScript, _) => body.push(format!("  acc = acc > {k} ? acc - 1 : acc + 1;")),
        }
    }
    let mut out = Vec::new();
    match lang {
        Lang::Rust => {
            out.push(format!("pub fn {name}(x: i64) -> i64 {{"));
            out.push("    let mut acc = x;".into());
            out.extend(body);
            out.push("    acc".into());
            out.push("}".into());
        }
        Lang::Python => {
            out.push(format!("def {name}(x):"));
            out.push("    acc = x".into());
            out.extend(body);
            out.push("    return acc".into());
        }
        Lang::JavaScript => {
            out.push(format!("function {name}(x) {{"));
            out.push("  let acc = x;".into());
            out.extend(body);
            out.push("  return acc;".into());
            out.push("}".into());
        }
    }
    out
}

impl SourceModel {
    fn render(&self) -> Vec<u8> {
        let mut s = String::new();
        for (i, f) in self.functions.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            for line in f {
                s.push_str(line);
                s.push('\n');
            }
        }
        s.into_bytes()
    }
}

struct RepoPlan {
    name: &'static str,
    lang: Lang,
    people: Vec<Person>,
}

struct Person {
    author: Author,
    /// Further signatures used for some commits (aliases).
    aliases: Vec<Author>,
    login: String,
    commits: usize,
    mean_lines: f64,
    bugfix_rate: f64,
    negativity: f64,
}

const NEUTRAL: [&str; 6] = [
    "Add {x} support",
    "Update {x} handling",
    "Refactor {x} module",
    "Document {x} behaviour",
    "Rename {x} helpers",
    "Extend {x} tests",
];
const BUGFIX_NEGATIVE: [&str; 4] = [
    "Fix crash in {x}",
    "Fix broken {x} output",
    "Hotfix for ugly {x} regression",
    "Fix wrong {x} result",
];
const BUGFIX_NEUTRAL: [&str; 2] = ["Fix {x} edge case", "Patch {x} parsing"];
const POSITIVE: [&str; 4] = [
    "Nice cleanup of {x}",
    "Improve {x} performance",
    "Simplify {x} code, much cleaner",
    "Great speedup for {x}",
];
const NEGATIVE: [&str; 3] = [
    "Revert terrible {x} change",
    "Work around flaky {x} tests",
    "Remove useless {x} hack",
];
const TOPICS: [&str; 8] = ["parser", "cache", "config", "scheduler", "logging", "io", "metrics", "cli"];

fn plans() -> Vec<RepoPlan> {
    let p = |name: &str, email: &str, login: &str, commits: usize, mean_lines: f64, bugfix_rate: f64, negativity: f64| Person {
        author: Author::new(name, email),
        aliases: Vec::new(),
        login: login.into(),
        commits,
        mean_lines,
        bugfix_rate,
        negativity,
    };
    let mut alpha = vec![
        p("Ada Okafor", "ada@alpha.dev", "ada", 64, 9.0, 0.15, 0.10),
        p("Bruno Lima", "bruno@alpha.dev", "bruno", 41, 6.0, 0.30, 0.25),
        p("Chen Wei", "chen@alpha.dev", "chen", 28, 5.0, 0.20, 0.05),
        p("Dana Kowalski", "dana@alpha.dev", "dana", 22, 4.0, 0.35, 0.30),
        p("Eli Park", "eli@alpha.dev", "eli", 7, 3.0, 0.0, 0.0),
    ];
    alpha[1].aliases.push(Author::new("bruno lima", "bruno.lima@users.noreply.github.com"));
    let mut beta = vec![
        p("Zoë Quiñones", "zoe@beta.org", "zoeq", 57, 8.0, 0.10, 0.15),
        p("Femi Adeyemi", "femi@beta.org", "femi", 46, 7.0, 0.25, 0.20),
        p("Chen Wei", "chen@alpha.dev", "chen", 30, 4.0, 0.15, 0.10),
        p("Gus Ahlberg", "gus@beta.org", "gus", 24, 6.0, 0.40, 0.35),
        p("Hana Sato", "hana@beta.org", "hana", 5, 2.0, 0.0, 0.0),
    ];
    beta[0].aliases.push(Author::new("Zoe Quinones", "zq@laptop.local"));
    let mut gamma = vec![
        p("Ines Moreau", "ines@gamma.io", "ines", 70, 10.0, 0.12, 0.05),
        p("Jamal Reed", "jamal@gamma.io", "jamal", 38, 5.0, 0.28, 0.30),
        p("Kai Müller", "kai@gamma.io", "kaim", 33, 6.0, 0.20, 0.10),
        p("Lena Novak", "lena@gamma.io", "lena", 21, 3.0, 0.45, 0.40),
        p("Mo Haddad", "mo@gamma.io", "mo", 26, 7.0, 0.10, 0.20),
    ];
    gamma[2].aliases.push(Author::new("KAI MÜLLER", "Kai@Gamma.io"));
    vec![
        RepoPlan {
            name: "alpha",
            lang: Lang::Rust,
            people: alpha,
        },
        RepoPlan {
            name: "beta",
            lang: Lang::Python,
            people: beta,
        },
        RepoPlan {
            name: "gamma",
            lang: Lang::JavaScript,
            people: gamma,
        },
    ]
}

fn message(rng: &mut ChaCha8Rng, p: &Person) -> String {
    let topic = TOPICS[rng.random_range(0..TOPICS.len())];
    let template = if rng.random_bool(p.bugfix_rate) {
        if rng.random_bool(p.negativity.max(0.3)) {
            BUGFIX_NEGATIVE[rng.random_range(0..BUGFIX_NEGATIVE.len())]
        } else {
            BUGFIX_NEUTRAL[rng.random_range(0..BUGFIX_NEUTRAL.len())]
        }
    } else if rng.random_bool(p.negativity) {
        NEGATIVE[rng.random_range(0..NEGATIVE.len())]
    } else if rng.random_bool(0.2) {
        POSITIVE[rng.random_range(0..POSITIVE.len())]
    } else {
        NEUTRAL[rng.random_range(0..NEUTRAL.len())]
    };
    template.replace("{x}", topic)
}

fn is_bug_fix_message(m: &str) -> bool {
    m.starts_with("Fix") || m.starts_with("Hotfix") || m.starts_with("Patch")
}

/// Edits source models so roughly `target` lines change; returns the
/// touched paths.
fn edit_sources(
    rng: &mut ChaCha8Rng,
    lang: Lang,
    sources: &mut BTreeMap<String, SourceModel>,
    target: usize,
    salt: &mut u32,
) -> Vec<String> {
    let n_files = sources.len();
    let mut touched = Vec::new();
    let want_files = if rng.random_bool(0.3) { 2 } else { 1 };
    for _ in 0..want_files {
        let create = n_files < 3 || rng.random_bool(0.08);
        let path = if create {
            format!("{}/module{}.{}", lang.dir(), sources.len(), lang.ext())
        } else {
            let keys: Vec<&String> = sources.keys().collect();
            keys[rng.random_range(0..keys.len())].clone()
        };
        let model = sources.entry(path.clone()).or_default();
        let mut changed = 0usize;
        while changed < target.max(1) {
            *salt += 1;
            let op = rng.random_range(0..10);
            if model.functions.is_empty() || op < 4 {
                let branches = rng.random_range(0..4);
                let plain = rng.random_range(1..=target.clamp(1, 8));
                let name = format!("f{}", *salt);
                let block = function_block(lang, &name, branches, plain, *salt);
                changed += block.len();
                let at = rng.random_range(0..=model.functions.len());
                model.functions.insert(at, block);
            } else if op < 9 {
                let i = rng.random_range(0..model.functions.len());
                let f = &mut model.functions[i];
                // Replace one body line (never the header or the tail).
                if f.len() > 3 {
                    let j = rng.random_range(2..f.len() - 1);
                    let new_line = match lang {
                        Lang::Rust => format!("    acc = acc.rotate_left({});", *salt % 60),
                        Lang::Python => format!("    acc = acc ^ {}", *salt),
                        Lang::JavaScript => format!("  acc = acc ^ {};", *salt),
                    };
                    if f[j].contains("acc = acc") {
                        f[j] = new_line;
                        changed += 2;
                    } else {
                        changed += 1;
                    }
                } else {
                    changed += 1;
                }
            } else if model.functions.len() > 1 {
                let i = rng.random_range(0..model.functions.len());
                changed += model.functions.remove(i).len();
            } else {
                changed += 1;
            }
        }
        if !touched.contains(&path) {
            touched.push(path);
        }
    }
    touched
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub root: PathBuf,
    pub repo_paths: Vec<PathBuf>,
    pub snapshot_paths: Vec<PathBuf>,
    pub config_path: PathBuf,
    /// What each repository was generated with, in `repo_paths` order.
    pub ledgers: Vec<GenerationLedger>,
}

/// Per-repository ledger recorded while generating, used by tests.
#[derive(Debug, Clone, Default)]
pub struct GenerationLedger {
    /// (email, message, timestamp) for each main-line non-merge commit.
    pub commits: Vec<(String, String, i64)>,
    pub merges: usize,
}

fn base_time(repo_index: usize) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 8, 9, 0, 0).unwrap() + Duration::days(repo_index as i64 * 3)
}

fn generate_repo(
    path: &Path,
    plan: &RepoPlan,
    seed: u64,
    repo_index: usize,
) -> Result<(GenerationLedger, ForgeSnapshot), FixtureError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(repo_index as u64));
    let mut w = RepoWriter::init(path)?;
    let mut ledger = GenerationLedger::default();
    let bot = Author::new("dependabot[bot]", "49699333+dependabot[bot]@users.noreply.github.com");

    let mut order: Vec<usize> = plan
        .people
        .iter()
        .enumerate()
        .flat_map(|(i, p)| std::iter::repeat_n(i, p.commits))
        .collect();
    order.shuffle(&mut rng);
    // The first commit belongs to the most active person.
    if let Some(pos) = order.iter().position(|&i| i == 0) {
        order.swap(0, pos);
    }
    let bot_slots: Vec<usize> = (0..4).map(|k| (k + 1) * order.len() / 5).collect();
    let merge_at = order.len() * 3 / 5;
    let empty_at = order.len() / 3;

    let mut t = base_time(repo_index).timestamp();
    let mut sources: BTreeMap<String, SourceModel> = BTreeMap::new();
    let mut salt = (repo_index as u32 + 1) * 10_000;
    let mut pending_side: Option<(Oid, Changes)> = None;

    // Root commit: README and a binary asset.
    let mut root = Changes::new();
    root.insert("README.md".into(), Some(format!("# {}\n\nSynthetic fixture project.\n", plan.name).into_bytes()));
    let mut blob = vec![0u8, 159, 146, 150];
    blob.extend((0..64u8).map(|b| b.wrapping_mul(37)));
    root.insert("assets/logo.bin".into(), Some(blob));
    let first = &plan.people[0];
    w.commit(&first.author, t, "Initial commit", &root)?;
    ledger.commits.push((first.author.email.clone(), "Initial commit".into(), t));

    for (k, &who) in order.iter().enumerate().skip(1) {
        let gap_minutes: i64 = match rng.random_range(0..20) {
            0 => 24 * 60,
            1..=11 => rng.random_range(1..=48) * 15,
            12..=16 => rng.random_range(13..=30) * 60,
            _ => rng.random_range(30..=96) * 60,
        };
        t += gap_minutes * 60;
        let person = &plan.people[who];
        let author = if !person.aliases.is_empty() && rng.random_bool(0.3) {
            &person.aliases[rng.random_range(0..person.aliases.len())]
        } else {
            &person.author
        };

        if bot_slots.contains(&k) {
            let bump = format!("[dependencies]\nserde = \"1.0.{}\"\n", 100 + k);
            let mut ch = Changes::new();
            ch.insert("deps.lock".into(), Some(bump.into_bytes()));
            w.commit(&bot, t - 600, &format!("Bump serde to 1.0.{}", 100 + k), &ch)?;
            ledger.commits.push((bot.email.clone(), format!("Bump serde to 1.0.{}", 100 + k), t - 600));
        }

        if k == empty_at {
            let msg = "Trigger CI rebuild";
            w.commit(author, t, msg, &Changes::new())?;
            ledger.commits.push((author.email.clone(), msg.into(), t));
            continue;
        }

        if k == merge_at {
            let mut ch = Changes::new();
            ch.insert(
                "docs/notes.md".into(),
                Some(format!("# Notes\n\nDesign notes for {}.\nWritten on a branch.\n", plan.name).into_bytes()),
            );
            let side = w.side_commit(author, t, "Add design notes", &ch)?;
            pending_side = Some((side, ch));
            continue;
        }

        let msg = message(&mut rng, person);
        let scale = if is_bug_fix_message(&msg) { 0.5 } else { 1.0 };
        let target = ((person.mean_lines * scale) * rng.random_range(0.5..1.5)).round().max(1.0) as usize;
        let touched = edit_sources(&mut rng, plan.lang, &mut sources, target, &mut salt);
        let mut ch = Changes::new();
        for p in touched {
            ch.insert(p.clone(), Some(sources[&p].render()));
        }
        w.commit(author, t, &msg, &ch)?;
        ledger.commits.push((author.email.clone(), msg, t));

        if let Some((side, side_changes)) = pending_side.take_if(|_| k >= merge_at + 3) {
            t += 900;
            let maint = &plan.people[0].author;
            w.merge(side, maint, t, "Merge branch 'notes'", &side_changes)?;
            ledger.merges += 1;
        }
    }
    let last_t = t;
    w.finish()?;

    let snapshot = generate_snapshot(&mut rng, plan, repo_index, last_t);
    Ok((ledger, snapshot))
}

fn generate_snapshot(rng: &mut ChaCha8Rng, plan: &RepoPlan, repo_index: usize, last_t: i64) -> ForgeSnapshot {
    let start = base_time(repo_index);
    let span_h = ((last_t - start.timestamp()) / 3600).max(48);
    let at = |h: i64| start + Duration::hours(h);
    let mut snap = ForgeSnapshot::empty(plan.name);
    let mut number = 1;
    let mut logins: Vec<&str> = plan.people.iter().map(|p| p.login.as_str()).collect();
    logins.push("drive-by-reporter");
    logins.push("dependabot[bot]");
    for login in &logins {
        let n_prs = rng.random_range(1..=6);
        for _ in 0..n_prs {
            let created = rng.random_range(0..span_h - 24);
            let merged = rng.random_bool(0.75).then(|| created + rng.random_range(1..=72));
            snap.pull_requests.push(PullRequest {
                number,
                author_login: login.to_string(),
                created_at: at(created),
                merged_at: merged.map(at),
                closed_at: merged.map(at),
            });
            number += 1;
        }
        if *login != "dependabot[bot]" {
            for _ in 0..rng.random_range(0..=5) {
                snap.issues.push(IssueRecord {
                    number,
                    author_login: login.to_string(),
                    created_at: at(rng.random_range(0..span_h)),
                    state: if rng.random_bool(0.6) { IssueState::Closed } else { IssueState::Open },
                });
                number += 1;
            }
        }
    }
    // A repository with one very slow PR.
    if repo_index == 2 {
        snap.pull_requests.push(PullRequest {
            number,
            author_login: plan.people[0].login.clone(),
            created_at: at(1),
            merged_at: Some(at(1 + 24 * 40)),
            closed_at: Some(at(1 + 24 * 40)),
        });
    }
    let success_p = [0.9, 0.7, 0.8][repo_index % 3];
    for i in 0..rng.random_range(20..40) {
        let conclusion = match rng.random_range(0..10) {
            0 => CiConclusion::Other,
            _ if rng.random_bool(success_p) => CiConclusion::Success,
            _ => CiConclusion::Failure,
        };
        snap.ci_runs.push(CiRun {
            run_id: format!("{}-{}", plan.name, 1000 + i),
            finished_at: at(rng.random_range(0..span_h)),
            conclusion,
        });
    }
    snap.ci_runs.sort_by(|a, b| a.finished_at.cmp(&b.finished_at).then_with(|| a.run_id.cmp(&b.run_id)));
    if repo_index != 1 {
        for p in &plan.people {
            snap.extra_columns.insert(
                p.login.clone(),
                ExtraColumns {
                    total_code_reviews: (p.commits as u64) / 3 + rng.random_range(0..6),
                    total_deployments: rng.random_range(0..4),
                },
            );
        }
    }
    snap
}

pub const FIXTURE_CONFIG: &str = include_str!("../data/fixture_config.toml");
pub const DEFAULT_SEED: u64 = 7;

/// Writes three repositories, their snapshots, an alias file and a run
/// configuration under `root` (which must be empty or absent).
pub fn generate_corpus(root: &Path, seed: u64) -> Result<Corpus, FixtureError> {
    if root.exists() {
        let mut entries = fs::read_dir(root).map_err(io_err(root))?;
        if entries.next().is_some() {
            return Err(FixtureError::NotEmpty(root.display().to_string()));
        }
    }
    let mut repo_paths = Vec::new();
    let mut snapshot_paths = Vec::new();
    let mut ledgers = Vec::new();
    let snap_dir = root.join("snapshots");
    fs::create_dir_all(&snap_dir).map_err(io_err(&snap_dir))?;
    for (i, plan) in plans().iter().enumerate() {
        let path = root.join("repos").join(plan.name);
        let (ledger, snapshot) = generate_repo(&path, plan, seed, i)?;
        ledgers.push(ledger);
        let sp = snap_dir.join(format!("{}.json", plan.name));
        fs::write(&sp, snapshot.to_json()).map_err(io_err(&sp))?;
        repo_paths.push(path);
        snapshot_paths.push(sp);
    }
    let aliases = root.join("aliases.csv");
    fs::write(&aliases, "raw_email,canonical_id\nzq@laptop.local,zoe@beta.org\n").map_err(io_err(&aliases))?;
    let config_path = root.join("spacex.toml");
    fs::write(&config_path, FIXTURE_CONFIG).map_err(io_err(&config_path))?;
    Ok(Corpus {
        root: root.to_path_buf(),
        repo_paths,
        snapshot_paths,
        config_path,
        ledgers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_blocks_have_expected_complexity() {
        use crate::ingest::estimate_complexity;
        // if, while, if + && / if, while, if + and / if, for, ternary
        for (lang, hint, want) in [(Lang::Rust, "rs", 5), (Lang::Python, "py", 5), (Lang::JavaScript, "js", 4)] {
            let src = function_block(lang, "f", 3, 2, 5).join("\n");
            assert_eq!(estimate_complexity(&src, Some(hint)), vec![want], "{hint}");
        }
    }

    #[test]
    fn writer_builds_nested_trees() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = RepoWriter::init(dir.path()).unwrap();
        let a = Author::new("A", "a@x");
        let mut ch = Changes::new();
        ch.insert("a/b/c.txt".into(), Some(b"hi\n".to_vec()));
        ch.insert("top.txt".into(), Some(b"top\n".to_vec()));
        w.commit(&a, 1_700_000_000, "one", &ch).unwrap();
        w.finish().unwrap();
        assert_eq!(fs::read_to_string(dir.path().join("a/b/c.txt")).unwrap(), "hi\n");
    }
}
