use std::collections::BTreeMap;

use proptest::prelude::*;
use spacex_core::cleaning::{filter_low_activity, iqr_filter, winsorize, DEFAULT_MIN_COMMITS};
use spacex_core::identity::{dealias_raw, AliasOverrides, RawIdentity};
use spacex_core::metrics::AuthorProjectRow;
use spacex_core::table::Table;
use spacex_stats::DataColumn;
use spacex_testkit::cleaning::{closure_components, fence_survivors};

fn row(id: usize, commits: u64) -> AuthorProjectRow {
    AuthorProjectRow {
        project_name: "p".into(),
        canonical_id: format!("dev{id}"),
        total_commits: commits,
        code_churn: commits * 10,
        bug_fix_commits: 0,
        avg_complexity_per_method: None,
        negative_commit_pct: 0.0,
        total_issues: 0,
        total_prs: 0,
        project_age_years: 1.0,
        mean_commit_gap_hours: None,
        avg_daily_commits: 1.0,
        avg_daily_churn: 1.0,
        total_code_reviews: None,
        total_deployments: None,
    }
}

// Spelling variants per person; every variant of one entry normalizes alike.
const NAMES: [&[&str]; 5] = [
    &["Zoë Quiñones", "Zoe Quinones", "ZOE  QUINONES"],
    &["Kai Müller", "kai muller"],
    &["Ann Lee", "ann lee "],
    &["Bo"],
    &[""],
];
const EMAILS: [&[&str]; 5] = [
    &["zoe@x.org", "ZOE@x.org"],
    &["kai@x.org", " kai@x.org"],
    &["ann@y.org"],
    &["bo@z.org", "Bo@Z.org"],
    &[""],
];

/// Type-7 quantile by direct order-statistic interpolation.
fn hand_quantile(values: &[f64], p: f64) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = (s.len() - 1) as f64 * p;
    let (i, frac) = (h.floor() as usize, h - h.floor());
    if i + 1 < s.len() {
        s[i] + frac * (s[i + 1] - s[i])
    } else {
        s[i]
    }
}

fn table(columns: &[Vec<f64>]) -> Table {
    let mut t = Table::new("t");
    for (i, c) in columns.iter().enumerate() {
        t.columns.push(DataColumn::new(format!("c{i}"), c.clone()));
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn iqr_filter_matches_brute_force_fences(
        n in 1usize..100,
        cols in 1usize..4,
        seed in proptest::collection::vec(-50.0f64..50.0, 300),
        k in prop_oneof![Just(1.5), 0.0f64..3.0],
    ) {
        let columns: Vec<Vec<f64>> = (0..cols)
            .map(|c| (0..n).map(|i| {
                let v = seed[(c * 100 + i) % seed.len()];
                // Heavy tails and ties.
                if i % 7 == 0 { v * 20.0 } else { v.round() }
            }).collect())
            .collect();
        let names: Vec<String> = (0..cols).map(|i| format!("c{i}")).collect();
        let t = table(&columns);
        let (kept, report) = iqr_filter(&t, &names, k).unwrap();
        let want = fence_survivors(&columns, k);
        let survivors: Vec<f64> = (0..n).filter(|&i| want[i]).map(|i| columns[0][i]).collect();
        prop_assert_eq!(kept.column("c0").unwrap().present(), survivors);
        prop_assert_eq!(report.outlier_rows_removed, want.iter().filter(|k| !**k).count());
        // Subset: every kept row comes from the input.
        prop_assert!(kept.n_rows() <= t.n_rows());
    }

    #[test]
    fn winsorize_is_monotone_and_bounded_by_quantiles(
        values in proptest::collection::vec(-1e3f64..1e3, 1..100),
        lo in 0.0f64..0.3,
        width in 0.1f64..0.7,
    ) {
        let hi = (lo + width).min(1.0);
        let (out, changed) = winsorize(&values, lo, hi).unwrap();
        prop_assert_eq!(out.len(), values.len());
        let (qlo, qhi) = (hand_quantile(&values, lo), hand_quantile(&values, hi));
        for i in 0..values.len() {
            prop_assert!(out[i] >= qlo - 1e-12 && out[i] <= qhi + 1e-12);
            if values[i] > qlo && values[i] < qhi {
                prop_assert_eq!(out[i], values[i]);
            }
            for j in 0..values.len() {
                if values[i] <= values[j] {
                    prop_assert!(out[i] <= out[j]);
                }
            }
        }
        prop_assert_eq!(changed, values.iter().zip(&out).filter(|(a, b)| a != b).count());
    }

    #[test]
    fn low_activity_keeps_exactly_the_rows_at_or_above_threshold(
        commits in proptest::collection::vec(0u64..60, 0..100),
    ) {
        let rows: Vec<_> = commits.iter().enumerate().map(|(i, c)| row(i, *c)).collect();
        let (kept, report) = filter_low_activity(rows.clone(), DEFAULT_MIN_COMMITS);
        let want: Vec<_> = rows.iter().filter(|r| r.total_commits >= 20).cloned().collect();
        prop_assert_eq!(report.low_activity_removed, rows.len() - want.len());
        prop_assert_eq!(&kept, &want);
        let (all, r0) = filter_low_activity(rows.clone(), 0);
        prop_assert_eq!(all, rows);
        prop_assert_eq!(r0.low_activity_removed, 0);
        let (again, r2) = filter_low_activity(kept.clone(), DEFAULT_MIN_COMMITS);
        prop_assert_eq!(again, kept);
        prop_assert_eq!(r2.low_activity_removed, 0);
    }

    #[test]
    fn dealias_groups_equal_transitive_closure(
        picks in proptest::collection::vec((0usize..5, 0usize..3, 0usize..5, 0usize..2), 1..30),
    ) {
        let mut raw: BTreeMap<RawIdentity, usize> = BTreeMap::new();
        // (name class, email class) per distinct raw identity.
        let mut classes: BTreeMap<RawIdentity, (usize, usize)> = BTreeMap::new();
        for (nc, nv, ec, ev) in picks {
            let name = NAMES[nc][nv % NAMES[nc].len()];
            let email = EMAILS[ec][ev % EMAILS[ec].len()];
            let r = RawIdentity::new(name.to_string(), email.to_string());
            *raw.entry(r.clone()).or_default() += 1;
            classes.insert(r, (nc, ec));
        }
        let nodes: Vec<_> = classes.iter().collect();
        let mut edges = Vec::new();
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                let (a, b) = (nodes[i].1, nodes[j].1);
                // Class 4 is the empty string, which never links.
                if (a.0 == b.0 && a.0 != 4) || (a.1 == b.1 && a.1 != 4) {
                    edges.push((i, j));
                }
            }
        }
        let comp = closure_components(nodes.len(), &edges);
        let (map, _) = dealias_raw(&raw, &AliasOverrides::default());
        for i in 0..nodes.len() {
            for j in 0..nodes.len() {
                let same = map.resolve(nodes[i].0).unwrap().canonical_id == map.resolve(nodes[j].0).unwrap().canonical_id;
                prop_assert_eq!(same, comp[i] == comp[j], "{:?} vs {:?}", nodes[i].0, nodes[j].0);
            }
        }
        let n_components = {
            let mut c = comp.clone();
            c.sort();
            c.dedup();
            c.len()
        };
        prop_assert_eq!(map.len(), n_components);

        // A second pass over the canonical signatures changes nothing.
        let canon: BTreeMap<RawIdentity, usize> = map
            .identities()
            .iter()
            .map(|i| (RawIdentity::new(i.display_name.clone(), i.canonical_id.clone()), 1))
            .collect();
        let (again, _) = dealias_raw(&canon, &AliasOverrides::default());
        prop_assert_eq!(again.len(), map.len());
        for i in map.identities() {
            let r = RawIdentity::new(i.display_name.clone(), i.canonical_id.clone());
            prop_assert_eq!(&again.resolve(&r).unwrap().canonical_id, &i.canonical_id);
        }
    }
}

#[test]
fn boundary_at_twenty_is_kept() {
    let (kept, _) = filter_low_activity(vec![row(0, 19), row(1, 20), row(2, 21)], 20);
    let ids: Vec<_> = kept.iter().map(|r| r.canonical_id.as_str()).collect();
    assert_eq!(ids, ["dev1", "dev2"]);
}
