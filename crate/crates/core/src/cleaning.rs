//! Row-level cleaning: low-activity exclusion, winsorization and Tukey
//! IQR fences.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use spacex_stats::quantile_sorted;
use thiserror::Error;

use crate::metrics::AuthorProjectRow;
use crate::table::Table;

#[derive(Debug, Error, PartialEq)]
pub enum CleaningError {
    #[error("no values to clean")]
    EmptyInput,
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("invalid quantile bounds ({lower}, {upper})")]
    InvalidBounds { lower: f64, upper: f64 },
}

/// Audit trail of one cleaning pass; parameters are stored verbatim.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub merged_alias_groups: usize,
    pub bots_removed: usize,
    pub low_activity_removed: usize,
    pub outlier_rows_removed: usize,
    pub winsorized_cells: usize,
    pub parameters: IndexMap<String, serde_json::Value>,
}

impl CleaningReport {
    pub fn absorb(&mut self, other: CleaningReport) {
        self.merged_alias_groups += other.merged_alias_groups;
        self.bots_removed += other.bots_removed;
        self.low_activity_removed += other.low_activity_removed;
        self.outlier_rows_removed += other.outlier_rows_removed;
        self.winsorized_cells += other.winsorized_cells;
        self.parameters.extend(other.parameters);
    }

    pub fn with_parameter(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }
}

pub const DEFAULT_MIN_COMMITS: u64 = 20;
pub const DEFAULT_IQR_MULTIPLIER: f64 = 1.5;

/// Keeps rows with at least `min_commits` commits.
pub fn filter_low_activity(
    rows: Vec<AuthorProjectRow>,
    min_commits: u64,
) -> (Vec<AuthorProjectRow>, CleaningReport) {
    let before = rows.len();
    let kept: Vec<_> = rows
        .into_iter()
        .filter(|r| r.total_commits >= min_commits)
        .collect();
    let report = CleaningReport {
        low_activity_removed: before - kept.len(),
        ..CleaningReport::default()
    }
    .with_parameter("min_commits", min_commits);
    (kept, report)
}

fn check_bounds(lower: f64, upper: f64) -> Result<(), CleaningError> {
    if !(0.0..=1.0).contains(&lower) || !(0.0..=1.0).contains(&upper) || lower >= upper {
        return Err(CleaningError::InvalidBounds { lower, upper });
    }
    Ok(())
}

/// Clamps values to the type-7 `lower_pct` and `upper_pct` quantiles.
/// Returns the clamped values and how many cells changed.
pub fn winsorize(
    values: &[f64],
    lower_pct: f64,
    upper_pct: f64,
) -> Result<(Vec<f64>, usize), CleaningError> {
    if values.is_empty() {
        return Err(CleaningError::EmptyInput);
    }
    check_bounds(lower_pct, upper_pct)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = quantile_sorted(&sorted, lower_pct);
    let hi = quantile_sorted(&sorted, upper_pct);
    let mut changed = 0;
    let out = values
        .iter()
        .map(|&v| {
            let c = v.clamp(lo, hi);
            if c != v {
                changed += 1;
            }
            c
        })
        .collect();
    Ok((out, changed))
}

/// Winsorizes one table column in place, leaving missing cells alone.
pub fn winsorize_column(
    table: &mut Table,
    column: &str,
    lower_pct: f64,
    upper_pct: f64,
) -> Result<CleaningReport, CleaningError> {
    let col = table
        .column_mut(column)
        .ok_or_else(|| CleaningError::UnknownColumn(column.to_string()))?;
    let present: Vec<(usize, f64)> = col
        .values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.filter(|x| !x.is_nan()).map(|x| (i, x)))
        .collect();
    let mut changed = 0;
    if !present.is_empty() {
        let values: Vec<f64> = present.iter().map(|&(_, v)| v).collect();
        let (clamped, n) = winsorize(&values, lower_pct, upper_pct)?;
        changed = n;
        for (&(i, _), v) in present.iter().zip(clamped) {
            col.values[i] = Some(v);
        }
    } else {
        check_bounds(lower_pct, upper_pct)?;
    }
    Ok(CleaningReport {
        winsorized_cells: changed,
        ..CleaningReport::default()
    }
    .with_parameter(
        &format!("winsorize.{column}"),
        serde_json::json!({"lower": lower_pct, "upper": upper_pct, "quantile": "type7"}),
    ))
}

/// Tukey fences `[Q1 − k·IQR, Q3 + k·IQR]` over the present values.
pub fn fences(values: &[f64], k: f64) -> Option<(f64, f64)> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    if sorted.is_empty() {
        return None;
    }
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    Some((q1 - k * iqr, q3 + k * iqr))
}

/// Drops rows outside the fences of any named column. Fences come from
/// the unfiltered data and are applied once. Missing cells never remove a
/// row.
pub fn iqr_filter(table: &Table, columns: &[String], k: f64) -> Result<(Table, CleaningReport), CleaningError> {
    let mut keep = vec![true; table.n_rows()];
    for name in columns {
        let col = table
            .column(name)
            .ok_or_else(|| CleaningError::UnknownColumn(name.clone()))?;
        let Some((lo, hi)) = fences(&col.present(), k) else {
            continue;
        };
        for (i, v) in col.values.iter().enumerate() {
            if let Some(v) = v.filter(|x| !x.is_nan()) {
                if v < lo || v > hi {
                    keep[i] = false;
                }
            }
        }
    }
    let rows: Vec<usize> = (0..keep.len()).filter(|&i| keep[i]).collect();
    let report = CleaningReport {
        outlier_rows_removed: keep.len() - rows.len(),
        ..CleaningReport::default()
    }
    .with_parameter(
        "iqr",
        serde_json::json!({"columns": columns, "multiplier": k, "quantile": "type7"}),
    );
    Ok((table.select_rows(&rows), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spacex_stats::DataColumn;

    #[test]
    fn winsorize_one_to_hundred() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let (w, n) = winsorize(&v, 0.01, 0.99).unwrap();
        assert!((w[0] - 1.99).abs() < 1e-12);
        assert!((w[99] - 99.01).abs() < 1e-12);
        assert_eq!(n, 2);
        assert_eq!(&w[1..99], &v[1..99]);
    }

    #[test]
    fn winsorize_identity_cases() {
        let c = vec![3.0; 5];
        assert_eq!(winsorize(&c, 0.01, 0.99).unwrap(), (c.clone(), 0));
        let v = vec![5.0, -2.0, 9.0];
        assert_eq!(winsorize(&v, 0.0, 1.0).unwrap(), (v.clone(), 0));
        assert_eq!(winsorize(&[], 0.01, 0.99), Err(CleaningError::EmptyInput));
        assert!(matches!(winsorize(&v, 0.5, 0.5), Err(CleaningError::InvalidBounds { .. })));
    }

    fn one_column(values: Vec<f64>) -> Table {
        let mut t = Table::new("t");
        t.columns.push(DataColumn::new("x", values));
        t
    }

    #[test]
    fn iqr_removes_far_outlier() {
        let t = one_column(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 100.0]);
        let (lo, hi) = fences(&t.column("x").unwrap().present(), 1.5).unwrap();
        // Q1 = 3.25, Q3 = 7.75 under type 7
        assert!((hi - 14.5).abs() < 1e-12);
        assert!((lo - (-3.5)).abs() < 1e-12);
        let (out, rep) = iqr_filter(&t, &["x".into()], 1.5).unwrap();
        assert_eq!(out.n_rows(), 9);
        assert_eq!(rep.outlier_rows_removed, 1);
    }

    #[test]
    fn iqr_constant_and_unknown() {
        let t = one_column(vec![4.0; 6]);
        let (out, _) = iqr_filter(&t, &["x".into()], 1.5).unwrap();
        assert_eq!(out.n_rows(), 6);
        assert_eq!(
            iqr_filter(&t, &["nope".into()], 1.5).unwrap_err(),
            CleaningError::UnknownColumn("nope".into())
        );
    }

    #[test]
    fn winsorize_column_skips_missing() {
        let mut t = Table::new("t");
        let mut vals: Vec<Option<f64>> = (1..=100).map(|i| Some(f64::from(i))).collect();
        vals.push(None);
        t.columns.push(DataColumn::with_missing("m", vals));
        let rep = winsorize_column(&mut t, "m", 0.01, 0.99).unwrap();
        assert_eq!(rep.winsorized_cells, 2);
        assert_eq!(t.column("m").unwrap().values[100], None);
    }
}
