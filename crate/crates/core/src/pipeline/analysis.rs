//! Runs configured model specifications against dataset tables.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use spacex_stats::{
    complete_cases, log1p_transform, ols, partial_correlation, pearson, poisson_fit, vif, zscore, DataColumn,
    ModelKind, OlsOptions, PoissonOptions, StatError, StatReport,
};

use super::config::{AnalysisKind, AnalysisSpec, TransformOp};
use crate::table::Table;

/// Pairwise Pearson results in the layout of a correlation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub columns: Vec<String>,
    #[serde(deserialize_with = "spacex_stats::serde_float::deserialize_matrix")]
    pub r: Vec<Vec<f64>>,
    #[serde(deserialize_with = "spacex_stats::serde_float::deserialize_matrix")]
    pub p: Vec<Vec<f64>>,
    pub n: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisResult {
    Model(StatReport),
    Vif(#[serde(deserialize_with = "spacex_stats::serde_float::deserialize_map")] IndexMap<String, f64>),
    Matrix(CorrelationMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutput {
    pub result: AnalysisResult,
    /// Dataset row index of every residual, when the result has residuals.
    pub residual_rows: Vec<usize>,
    pub transform_log: Vec<String>,
}

fn column(table: &Table, name: &str) -> Result<DataColumn, StatError> {
    table
        .column(name)
        .cloned()
        .ok_or_else(|| StatError::EmptyInput(format!("column `{name}` missing from {}", table.name)))
}

/// Applies a spec's transforms to a copy of the table.
fn transformed(table: &Table, spec: &AnalysisSpec) -> Result<(Table, Vec<String>), StatError> {
    let mut t = table.clone();
    let mut log = Vec::new();
    for tr in &spec.transforms {
        let col = column(&t, &tr.column)?;
        let (new, entry) = match tr.op {
            TransformOp::Zscore => (
                zscore(&col)?,
                format!("zscore({}): (x - mean) / sd with sample (n-1) sd", tr.column),
            ),
            TransformOp::Log1p => (log1p_transform(&col)?, format!("log1p({}): ln(x + 1)", tr.column)),
        };
        if let Some(slot) = t.column_mut(&tr.column) {
            *slot = new;
        }
        log.push(entry);
    }
    Ok((t, log))
}

fn matrix(table: &Table, columns: &[String]) -> Result<CorrelationMatrix, StatError> {
    let k = columns.len();
    let cols = columns
        .iter()
        .map(|c| column(table, c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut r = vec![vec![1.0; k]; k];
    let mut p = vec![vec![1.0; k]; k];
    let mut n = vec![vec![0; k]; k];
    for i in 0..k {
        n[i][i] = cols[i].present().len();
        for j in i + 1..k {
            let c = pearson(&cols[i], &cols[j])?;
            r[i][j] = c.r;
            r[j][i] = c.r;
            p[i][j] = c.p;
            p[j][i] = c.p;
            n[i][j] = c.n;
            n[j][i] = c.n;
        }
    }
    Ok(CorrelationMatrix {
        columns: columns.to_vec(),
        r,
        p,
        n,
    })
}

/// Fits one configured analysis on `table`.
pub fn run_analysis(spec: &AnalysisSpec, table: &Table) -> Result<AnalysisOutput, StatError> {
    let (t, mut log) = transformed(table, spec)?;
    let total = t.n_rows();
    let response = || -> Result<DataColumn, StatError> {
        let name = spec.response.as_deref().unwrap_or_default();
        column(&t, name)
    };
    let predictors = spec
        .predictors
        .iter()
        .map(|p| column(&t, p))
        .collect::<Result<Vec<_>, _>>()?;
    let used_rows = |cols: &[&DataColumn]| -> Result<Vec<usize>, StatError> { Ok(complete_cases(cols)?.rows) };

    let (result, residual_rows) = match spec.kind {
        AnalysisKind::Pearson => {
            let y = response()?;
            let c = pearson(&predictors[0], &y)?;
            let rep = c.into_report(ModelKind::Pearson, &y.name, &predictors[0].name, total - c.n);
            (AnalysisResult::Model(rep), Vec::new())
        }
        AnalysisKind::PartialCorr => {
            let y = response()?;
            let controls = spec
                .controls
                .iter()
                .map(|c| column(&t, c))
                .collect::<Result<Vec<_>, _>>()?;
            let c = partial_correlation(&predictors[0], &y, &controls)?;
            let rep = c.into_report(ModelKind::PartialCorr, &y.name, &predictors[0].name, total - c.n);
            if !controls.is_empty() {
                log.push(format!(
                    "residual method: {} and {} each regressed on [{}] with intercept",
                    predictors[0].name,
                    y.name,
                    spec.controls.join(", ")
                ));
            }
            (AnalysisResult::Model(rep), Vec::new())
        }
        AnalysisKind::Ols => {
            let y = response()?;
            let rep = ols(&y, &predictors, OlsOptions { intercept: spec.intercept })?;
            let mut cols: Vec<&DataColumn> = vec![&y];
            cols.extend(predictors.iter());
            (AnalysisResult::Model(rep), used_rows(&cols)?)
        }
        AnalysisKind::Poisson => {
            let y = response()?;
            let labels: Option<Vec<String>> = spec.group.as_ref().map(|g| {
                t.label(g)
                    .map(|l| l.to_vec())
                    .or_else(|| t.column(g).map(|c| c.values.iter().map(|v| format!("{v:?}")).collect()))
                    .unwrap_or_default()
            });
            let group = spec.group.as_deref().zip(labels.as_deref());
            let rep = poisson_fit(&y, &predictors, group, PoissonOptions::default())?;
            let mut cols: Vec<&DataColumn> = vec![&y];
            cols.extend(predictors.iter());
            (AnalysisResult::Model(rep), used_rows(&cols)?)
        }
        AnalysisKind::Vif => (AnalysisResult::Vif(vif(&predictors)?), Vec::new()),
        AnalysisKind::CorrelationMatrix => (AnalysisResult::Matrix(matrix(&t, &spec.columns)?), Vec::new()),
    };
    let result = match result {
        AnalysisResult::Model(mut rep) => {
            let mut full = log.clone();
            full.append(&mut rep.transform_log);
            rep.transform_log = full.clone();
            log = full;
            AnalysisResult::Model(rep)
        }
        other => other,
    };
    Ok(AnalysisOutput {
        result,
        residual_rows,
        transform_log: log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::config::TransformSpec;

    fn spec(kind: AnalysisKind) -> AnalysisSpec {
        AnalysisSpec {
            name: "m".into(),
            kind,
            dataset: "authors".into(),
            response: Some("y".into()),
            predictors: vec!["x".into()],
            controls: vec![],
            columns: vec!["x".into(), "y".into()],
            transforms: vec![],
            group: None,
            intercept: true,
        }
    }

    fn table() -> Table {
        let mut t = Table::new("authors");
        t.columns.push(DataColumn::new("x", vec![1.0, 2.0, 3.0, 4.0, 5.0]));
        t.columns.push(DataColumn::with_missing("y", vec![Some(3.0), Some(5.0), None, Some(9.0), Some(11.0)]));
        t
    }

    #[test]
    fn ols_tracks_residual_rows() {
        let out = run_analysis(&spec(AnalysisKind::Ols), &table()).unwrap();
        assert_eq!(out.residual_rows, vec![0, 1, 3, 4]);
        let AnalysisResult::Model(rep) = out.result else { panic!() };
        assert!((rep.estimate("x").unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(rep.n_dropped, 1);
    }

    #[test]
    fn pearson_reports_drop_count_and_transforms() {
        let mut s = spec(AnalysisKind::Pearson);
        s.transforms.push(TransformSpec {
            column: "x".into(),
            op: TransformOp::Log1p,
        });
        let out = run_analysis(&s, &table()).unwrap();
        let AnalysisResult::Model(rep) = out.result else { panic!() };
        assert_eq!(rep.n_used, 4);
        assert_eq!(rep.n_dropped, 1);
        assert_eq!(rep.transform_log, vec!["log1p(x): ln(x + 1)".to_string()]);
    }

    #[test]
    fn matrix_is_symmetric_with_unit_diagonal() {
        let out = run_analysis(&spec(AnalysisKind::CorrelationMatrix), &table()).unwrap();
        let AnalysisResult::Matrix(m) = out.result else { panic!() };
        assert_eq!(m.r[0][0], 1.0);
        assert_eq!(m.p[1][1], 1.0);
        assert_eq!(m.r[0][1], m.r[1][0]);
        assert!((m.r[0][1] - 1.0).abs() < 1e-12);
    }
}
