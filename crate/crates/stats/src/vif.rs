use indexmap::IndexMap;

use crate::column::{complete_cases, DataColumn};
use crate::error::{StatError, StatResult};
use crate::linalg::{design, least_squares};
use crate::ols::{ols, OlsOptions, INTERCEPT};

/// Variance inflation factor of each predictor, `1 / (1 - R²_j)` from
/// regressing predictor j on the others (with intercept).
pub fn vif(predictors: &[DataColumn]) -> StatResult<IndexMap<String, f64>> {
    if predictors.len() < 2 {
        return Err(StatError::DegenerateInput(
            "VIF needs at least 2 predictors".into(),
        ));
    }
    let refs: Vec<&DataColumn> = predictors.iter().collect();
    let cc = complete_cases(&refs)?;
    let n = cc.rows.len();
    let cols: Vec<DataColumn> = predictors
        .iter()
        .zip(&cc.columns)
        .map(|(p, v)| DataColumn::new(p.name.clone(), v.clone()))
        .collect();

    // Full-design rank check so perfect collinearity names its term.
    let mut terms = vec![INTERCEPT.to_string()];
    let mut xcols = vec![vec![1.0; n]];
    for c in &cols {
        terms.push(c.name.clone());
        xcols.push(c.present());
    }
    if n <= terms.len() {
        return Err(StatError::Underdetermined {
            n,
            terms: terms.len(),
        });
    }
    let x = design(&xcols, n);
    let y = nalgebra::DVector::zeros(n);
    least_squares(&x, &y, &terms)?;

    let mut out = IndexMap::new();
    for j in 0..cols.len() {
        let others: Vec<DataColumn> = cols
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, c)| c.clone())
            .collect();
        let fit = ols(&cols[j], &others, OlsOptions::default())?;
        let r2 = fit.r_squared.unwrap_or(f64::NAN);
        if !(1.0 - r2 > 1e-12) {
            return Err(StatError::RankDeficient {
                term: cols[j].name.clone(),
            });
        }
        out.insert(cols[j].name.clone(), 1.0 / (1.0 - r2));
    }
    Ok(out)
}
