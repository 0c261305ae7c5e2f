//! Contributor de-aliasing and bot removal.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::cleaning::CleaningReport;
use crate::ingest::CommitRecord;

/// An author signature exactly as it appears in commits.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RawIdentity {
    pub name: String,
    pub email: String,
}

impl RawIdentity {
    pub fn new(name: impl Into<String>, email: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            email: email.into(),
        }
    }

    pub fn of(commit: &CommitRecord) -> Self {
        Self::new(commit.author_name.clone(), commit.author_email.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContributorIdentity {
    pub canonical_id: String,
    pub display_name: String,
    pub emails: BTreeSet<String>,
    pub names: BTreeSet<String>,
    pub is_bot: bool,
}

/// Lowercase, strip diacritics, collapse whitespace.
pub fn normalize_name(name: &str) -> String {
    let stripped: String = name.nfd().filter(|c| !is_combining_mark(*c)).collect();
    stripped
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn normalize_email(email: &str) -> String {
    email.trim().to_lowercase()
}

/// Mapping from raw signatures to merged contributors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityMap {
    identities: Vec<ContributorIdentity>,
    raw_to_identity: BTreeMap<RawIdentity, usize>,
    /// Raw signatures whose identity was removed as a bot.
    removed: BTreeMap<RawIdentity, String>,
}

impl IdentityMap {
    pub fn identities(&self) -> &[ContributorIdentity] {
        &self.identities
    }

    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    /// The kept identity a raw signature belongs to; `None` for unknown or
    /// removed signatures.
    pub fn resolve(&self, raw: &RawIdentity) -> Option<&ContributorIdentity> {
        self.raw_to_identity.get(raw).map(|&i| &self.identities[i])
    }

    pub fn resolve_commit(&self, commit: &CommitRecord) -> Option<&ContributorIdentity> {
        self.resolve(&RawIdentity::of(commit))
    }

    pub fn is_removed(&self, raw: &RawIdentity) -> bool {
        self.removed.contains_key(raw)
    }

    pub fn raw_identities(&self) -> impl Iterator<Item = (&RawIdentity, &ContributorIdentity)> {
        self.raw_to_identity
            .iter()
            .map(move |(r, &i)| (r, &self.identities[i]))
    }

    pub fn by_canonical(&self, canonical_id: &str) -> Option<&ContributorIdentity> {
        self.identities.iter().find(|i| i.canonical_id == canonical_id)
    }
}

/// `raw_email → canonical_id` pairs that force identities together.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasOverrides {
    pub by_email: BTreeMap<String, String>,
}

impl AliasOverrides {
    /// Parses `raw_email,canonical_id` CSV (header row required).
    pub fn from_csv(text: &str) -> Result<Self, csv::Error> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut by_email = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            if let (Some(email), Some(id)) = (rec.get(0), rec.get(1)) {
                if !email.is_empty() && !id.is_empty() {
                    by_email.insert(normalize_email(email), id.to_string());
                }
            }
        }
        Ok(Self { by_email })
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Merges raw signatures that share a lowercased email or a normalized name.
/// `weights` (commit counts) choose each identity's display name.
pub fn dealias_raw(
    raw: &BTreeMap<RawIdentity, usize>,
    overrides: &AliasOverrides,
) -> (IdentityMap, CleaningReport) {
    let nodes: Vec<&RawIdentity> = raw.keys().collect();
    let mut uf = UnionFind::new(nodes.len());
    let mut first_by_key: BTreeMap<(u8, String), usize> = BTreeMap::new();
    for (i, r) in nodes.iter().enumerate() {
        let email = normalize_email(&r.email);
        let name = normalize_name(&r.name);
        let mut keys = Vec::new();
        if !email.is_empty() {
            keys.push((0u8, email.clone()));
            if let Some(target) = overrides.by_email.get(&email) {
                keys.push((2u8, target.clone()));
            }
        }
        if !name.is_empty() {
            keys.push((1u8, name));
        }
        for key in keys {
            match first_by_key.get(&key) {
                Some(&j) => uf.union(i, j),
                None => {
                    first_by_key.insert(key, i);
                }
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..nodes.len() {
        groups.entry(uf.find(i)).or_default().push(i);
    }

    let mut identities: Vec<ContributorIdentity> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut merged_groups = 0;
    for group in groups.values() {
        if group.len() > 1 {
            merged_groups += 1;
        }
        let emails: BTreeSet<String> = group
            .iter()
            .map(|&i| normalize_email(&nodes[i].email))
            .filter(|e| !e.is_empty())
            .collect();
        let names: BTreeSet<String> = group
            .iter()
            .map(|&i| nodes[i].name.trim().to_string())
            .filter(|n| !n.is_empty())
            .collect();
        let override_id = emails
            .iter()
            .filter_map(|e| overrides.by_email.get(e))
            .min()
            .cloned();
        let canonical_id = override_id
            // Forge relay addresses only when nothing else is known.
            .or_else(|| emails.iter().find(|e| !e.contains("noreply")).or(emails.iter().next()).cloned())
            .or_else(|| group.iter().map(|&i| normalize_name(&nodes[i].name)).min())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| "unknown".to_string());
        // Most frequent name, ties to the lexicographically smallest.
        let mut name_weight: BTreeMap<&str, usize> = BTreeMap::new();
        for &i in group {
            let n = nodes[i].name.trim();
            if !n.is_empty() {
                *name_weight.entry(n).or_default() += raw[nodes[i]];
            }
        }
        let display_name = name_weight
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(n, _)| n.to_string())
            .unwrap_or_else(|| canonical_id.clone());
        identities.push(ContributorIdentity {
            canonical_id,
            display_name,
            emails,
            names,
            is_bot: false,
        });
        members.push(group.clone());
    }

    // Stable order by canonical id; merge groups that landed on one id via
    // overrides.
    let mut order: Vec<usize> = (0..identities.len()).collect();
    order.sort_by(|&a, &b| identities[a].canonical_id.cmp(&identities[b].canonical_id));
    let mut final_ids: Vec<ContributorIdentity> = Vec::new();
    let mut raw_to_identity = BTreeMap::new();
    for idx in order {
        let ident = identities[idx].clone();
        let slot = match final_ids.last_mut() {
            Some(last) if last.canonical_id == ident.canonical_id => {
                last.emails.extend(ident.emails);
                last.names.extend(ident.names);
                final_ids.len() - 1
            }
            _ => {
                final_ids.push(ident);
                final_ids.len() - 1
            }
        };
        for &m in &members[idx] {
            raw_to_identity.insert(nodes[m].clone(), slot);
        }
    }

    let report = CleaningReport {
        merged_alias_groups: merged_groups,
        ..CleaningReport::default()
    };
    (
        IdentityMap {
            identities: final_ids,
            raw_to_identity,
            removed: BTreeMap::new(),
        },
        report,
    )
}

/// De-aliases the authors of `records`.
pub fn dealias(records: &[CommitRecord], overrides: &AliasOverrides) -> (IdentityMap, CleaningReport) {
    let mut raw: BTreeMap<RawIdentity, usize> = BTreeMap::new();
    for r in records {
        *raw.entry(RawIdentity::of(r)).or_default() += 1;
    }
    dealias_raw(&raw, overrides)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BotPatterns {
    /// Case-insensitive name suffixes, e.g. `[bot]`.
    pub name_suffixes: Vec<String>,
    /// Case-insensitive substrings of a name or email.
    pub substrings: Vec<String>,
    /// Email suffix that marks a bot when the name also carries `[bot]`.
    pub noreply_suffix: String,
}

impl Default for BotPatterns {
    fn default() -> Self {
        Self {
            name_suffixes: vec!["[bot]".into()],
            substrings: vec!["dependabot".into(), "renovate".into(), "github-actions".into()],
            noreply_suffix: "@users.noreply.github.com".into(),
        }
    }
}

impl BotPatterns {
    pub fn is_bot_signature(&self, name: &str, email: &str) -> bool {
        let name = name.trim().to_lowercase();
        let email = email.trim().to_lowercase();
        if self
            .name_suffixes
            .iter()
            .any(|s| name.ends_with(&s.to_lowercase()))
        {
            return true;
        }
        if self.substrings.iter().any(|s| {
            let s = s.to_lowercase();
            name.contains(&s) || email.contains(&s)
        }) {
            return true;
        }
        !self.noreply_suffix.is_empty()
            && email.ends_with(&self.noreply_suffix.to_lowercase())
            && name.contains("[bot]")
    }

    pub fn is_bot(&self, identity: &ContributorIdentity) -> bool {
        identity.names.iter().any(|n| self.is_bot_signature(n, ""))
            || identity.emails.iter().any(|e| self.is_bot_signature("", e))
            || identity
                .names
                .iter()
                .any(|n| identity.emails.iter().any(|e| self.is_bot_signature(n, e)))
    }
}

/// Removes bot identities; their raw signatures stop resolving.
pub fn filter_bots(map: IdentityMap, patterns: &BotPatterns) -> (IdentityMap, CleaningReport) {
    let IdentityMap {
        identities,
        raw_to_identity,
        mut removed,
    } = map;
    let mut remap: Vec<Option<Result<usize, String>>> = vec![None; identities.len()];
    let mut kept = Vec::new();
    let mut bots = 0;
    for (i, ident) in identities.into_iter().enumerate() {
        if patterns.is_bot(&ident) {
            bots += 1;
            remap[i] = Some(Err(ident.canonical_id));
        } else {
            remap[i] = Some(Ok(kept.len()));
            kept.push(ident);
        }
    }
    let mut new_raw = BTreeMap::new();
    for (raw, idx) in raw_to_identity {
        match &remap[idx] {
            Some(Ok(k)) => {
                new_raw.insert(raw, *k);
            }
            Some(Err(id)) => {
                removed.insert(raw, id.clone());
            }
            None => {}
        }
    }
    (
        IdentityMap {
            identities: kept,
            raw_to_identity: new_raw,
            removed,
        },
        CleaningReport {
            bots_removed: bots,
            ..CleaningReport::default()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(pairs: &[(&str, &str)]) -> BTreeMap<RawIdentity, usize> {
        pairs.iter().map(|(n, e)| (RawIdentity::new(*n, *e), 1)).collect()
    }

    #[test]
    fn name_edge_merges() {
        let (m, rep) = dealias_raw(&raw(&[("Jane Doe", "jane@x.com"), ("jane  doe", "jd@y.com")]), &AliasOverrides::default());
        assert_eq!(m.len(), 1);
        assert_eq!(m.identities()[0].canonical_id, "jane@x.com");
        assert_eq!(rep.merged_alias_groups, 1);
    }

    #[test]
    fn email_edge_merges() {
        let (m, _) = dealias_raw(&raw(&[("A", "a@x.com"), ("B", "A@X.com")]), &AliasOverrides::default());
        assert_eq!(m.len(), 1);
        let (m, _) = dealias_raw(&raw(&[("A", "a@x.com"), ("B", "b@x.com")]), &AliasOverrides::default());
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn diacritics_are_stripped() {
        assert_eq!(normalize_name("  Víctor   Zabalza "), "victor zabalza");
        let (m, _) = dealias_raw(&raw(&[("Víctor Zabalza", "v@a.org"), ("Victor Zabalza", "vz@b.org")]), &AliasOverrides::default());
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn empty_fields_do_not_link() {
        let (m, _) = dealias_raw(&raw(&[("A", ""), ("B", ""), ("", "c@x.com"), ("", "d@x.com")]), &AliasOverrides::default());
        assert_eq!(m.len(), 4);
        assert!(m.identities().iter().any(|i| i.canonical_id == "a"));
    }

    #[test]
    fn overrides_force_a_canonical_id() {
        let overrides = AliasOverrides::from_csv("raw_email,canonical_id\nold@corp.com,alice\nalice@home.org,alice\n").unwrap();
        let (m, _) = dealias_raw(&raw(&[("Alice", "alice@home.org"), ("A. Smith", "old@corp.com")]), &overrides);
        assert_eq!(m.len(), 1);
        assert_eq!(m.identities()[0].canonical_id, "alice");
    }

    #[test]
    fn bot_rules() {
        let p = BotPatterns::default();
        assert!(p.is_bot_signature("dependabot[bot]", "49699333+dependabot[bot]@users.noreply.github.com"));
        assert!(p.is_bot_signature("Renovate Bot", "bot@renovateapp.com"));
        assert!(!p.is_bot_signature("Robotics Team", "robots@lab.org"));
        assert!(!p.is_bot_signature("Abbot", "abbot@x.org"));
    }

    #[test]
    fn filter_bots_drops_resolution() {
        let (m, _) = dealias_raw(&raw(&[("dependabot[bot]", "dep@x.com"), ("Robotics Team", "r@x.com")]), &AliasOverrides::default());
        let (m, rep) = filter_bots(m, &BotPatterns::default());
        assert_eq!(rep.bots_removed, 1);
        assert_eq!(m.len(), 1);
        assert!(m.resolve(&RawIdentity::new("dependabot[bot]", "dep@x.com")).is_none());
        assert!(m.is_removed(&RawIdentity::new("dependabot[bot]", "dep@x.com")));
        assert!(m.resolve(&RawIdentity::new("Robotics Team", "r@x.com")).is_some());
        let (empty, rep) = filter_bots(IdentityMap::default(), &BotPatterns::default());
        assert!(empty.is_empty());
        assert_eq!(rep.bots_removed, 0);
    }
}
