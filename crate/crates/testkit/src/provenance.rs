use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// One scripted commit: for every touched path, the full new content
/// (`None` deletes the file).
#[derive(Debug, Clone)]
pub struct ScriptedCommit {
    pub author: usize,
    pub timestamp: i64,
    pub message: String,
    pub files: BTreeMap<String, Option<Vec<String>>>,
}

#[derive(Debug, Clone)]
pub struct Script {
    /// (name, email) per author index.
    pub authors: Vec<(String, String)>,
    pub commits: Vec<ScriptedCommit>,
}

/// Surviving line counts per path per author email, tracked while the
/// script was generated.
pub type Provenance = BTreeMap<String, BTreeMap<String, usize>>;

/// Generates a random edit script and the provenance of every surviving
/// line. Every line ever written is unique, so the provenance recorded here
/// is the ground truth any correct diff-based attribution must reproduce.
pub fn random_script(seed: u64, commits: usize, authors: usize, files: usize) -> (Script, Provenance) {
    let mut rng = StdRng::seed_from_u64(seed);
    let authors: Vec<(String, String)> = (0..authors)
        .map(|a| (format!("Author {a}"), format!("author{a}@example.com")))
        .collect();
    let mut state: BTreeMap<String, Vec<(String, usize)>> = BTreeMap::new();
    let mut counter = 0usize;
    let mut t = 1_700_000_000i64;
    let mut out = Vec::with_capacity(commits);

    for c in 0..commits {
        let author = rng.random_range(0..authors.len());
        t += rng.random_range(60..20_000);
        let mut touched: BTreeMap<String, Option<Vec<String>>> = BTreeMap::new();
        let n_touch = rng.random_range(1..=files.min(3));
        for _ in 0..n_touch {
            let path = format!("pkg/file{}.txt", rng.random_range(0..files));
            if touched.contains_key(&path) {
                continue;
            }
            let exists = state.contains_key(&path);
            let action = rng.random_range(0..10);
            if exists && action == 0 && c > 0 {
                state.remove(&path);
                touched.insert(path, None);
                continue;
            }
            let lines = state.entry(path.clone()).or_default();
            let edits = rng.random_range(1..=3);
            for _ in 0..edits {
                if !lines.is_empty() && rng.random_bool(0.4) {
                    let start = rng.random_range(0..lines.len());
                    let len = rng.random_range(1..=(lines.len() - start).min(4));
                    lines.drain(start..start + len);
                }
                if lines.is_empty() || rng.random_bool(0.8) {
                    let at = rng.random_range(0..=lines.len());
                    let k = rng.random_range(1..=5);
                    let new: Vec<(String, usize)> = (0..k)
                        .map(|_| {
                            counter += 1;
                            (format!("line {counter} written by author {author}"), author)
                        })
                        .collect();
                    lines.splice(at..at, new);
                }
            }
            let content = lines.iter().map(|(l, _)| l.clone()).collect();
            touched.insert(path, Some(content));
        }
        if touched.is_empty() {
            continue;
        }
        out.push(ScriptedCommit {
            author,
            timestamp: t,
            message: format!("scripted change {c}"),
            files: touched,
        });
    }

    let mut provenance = Provenance::new();
    for (path, lines) in &state {
        let mut counts = BTreeMap::new();
        for (_, a) in lines {
            *counts.entry(authors[*a].1.clone()).or_insert(0) += 1;
        }
        if !counts.is_empty() {
            provenance.insert(path.clone(), counts);
        }
    }
    (
        Script {
            authors,
            commits: out,
        },
        provenance,
    )
}
