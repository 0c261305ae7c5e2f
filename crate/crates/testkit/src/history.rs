use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// A commit reduced to what interaction counting needs.
#[derive(Debug, Clone, PartialEq)]
pub struct PlainCommit {
    pub id: String,
    pub timestamp: i64,
    pub author: String,
    pub files: Vec<String>,
}

/// An interaction found by the quadratic oracle.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub struct PlainEvent {
    pub path: String,
    pub author_a: String,
    pub author_b: String,
    pub earlier: String,
    pub later: String,
    pub gap_hours: f64,
}

/// Quadratic reference: for every ordered pair (i, j), i before j, that both
/// touch a file with no other commit touching that file in between, emit an
/// event when the authors differ and the gap is at most `window_hours`.
/// `commits` must already be in history order.
pub fn brute_force_events(commits: &[PlainCommit], window_hours: f64) -> Vec<PlainEvent> {
    let mut out = Vec::new();
    for i in 0..commits.len() {
        for j in i + 1..commits.len() {
            for path in &commits[i].files {
                if !commits[j].files.contains(path) {
                    continue;
                }
                let between = (i + 1..j).any(|k| commits[k].files.contains(path));
                if between || commits[i].author == commits[j].author {
                    continue;
                }
                let gap = (commits[j].timestamp - commits[i].timestamp) as f64 / 3600.0;
                if gap > window_hours {
                    continue;
                }
                let (a, b) = if commits[i].author < commits[j].author {
                    (&commits[i].author, &commits[j].author)
                } else {
                    (&commits[j].author, &commits[i].author)
                };
                out.push(PlainEvent {
                    path: path.clone(),
                    author_a: a.clone(),
                    author_b: b.clone(),
                    earlier: commits[i].id.clone(),
                    later: commits[j].id.clone(),
                    gap_hours: gap,
                });
            }
        }
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out
}

/// Random history: up to `max_commits` commits by up to `max_authors`
/// authors over up to `max_files` files. Gaps are whole multiples of 15
/// minutes so the 24-hour boundary is hit exactly on a regular basis.
pub fn random_history(
    seed: u64,
    max_commits: usize,
    max_authors: usize,
    max_files: usize,
) -> Vec<PlainCommit> {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_commits);
    let authors = rng.random_range(1..=max_authors);
    let files = rng.random_range(1..=max_files);
    let mut t = 1_600_000_000i64;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let step = match rng.random_range(0..10) {
            0 => 24 * 3600,
            1 => 0,
            2 => 24 * 3600 + 900,
            _ => rng.random_range(0..40) * 900,
        };
        t += step;
        let touched = rng.random_range(1..=files.min(4));
        let mut fs: Vec<String> = (0..touched)
            .map(|_| format!("src/f{}.rs", rng.random_range(0..files)))
            .collect();
        fs.sort();
        fs.dedup();
        out.push(PlainCommit {
            id: format!("c{i:05}"),
            timestamp: t,
            author: format!("dev{}", rng.random_range(0..authors)),
            files: fs,
        });
    }
    out
}
