//! Log-link Poisson regression fitted by iteratively reweighted least squares.
//!
//! An optional grouping column is expanded into fixed per-group intercepts
//! (treatment coding, first level in sorted order is the reference). This
//! stands in for a random intercept; the substitution is recorded in the
//! report's transform log.

use std::collections::BTreeSet;

use indexmap::IndexMap;
use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::column::{complete_cases, DataColumn};
use crate::error::{StatError, StatResult};
use crate::linalg::least_squares;
use crate::ols::{ratio, INTERCEPT};
use crate::report::{ModelKind, StatReport, TermEstimate};

#[derive(Debug, Clone, Copy)]
pub struct PoissonOptions {
    pub max_iterations: usize,
    /// Converged when the largest absolute coefficient change drops below this.
    pub tolerance: f64,
}

impl Default for PoissonOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            tolerance: 1e-8,
        }
    }
}

fn unit_deviance(y: f64, mu: f64) -> f64 {
    let ylogy = if y > 0.0 { y * (y / mu).ln() } else { 0.0 };
    2.0 * (ylogy - (y - mu))
}

/// Fits `log E[y] = Xβ` with an intercept, optional fixed group intercepts,
/// and the given predictors.
///
/// Predictors that are constant within every group are absorbed by the group
/// intercepts; they are dropped and the drop is logged.
pub fn poisson_fit(
    y: &DataColumn,
    predictors: &[DataColumn],
    group: Option<(&str, &[String])>,
    opts: PoissonOptions,
) -> StatResult<StatReport> {
    let mut cols: Vec<&DataColumn> = vec![y];
    cols.extend(predictors.iter());
    if let Some((name, labels)) = group {
        if labels.len() != y.len() {
            return Err(StatError::LengthMismatch {
                column: name.to_string(),
                expected: y.len(),
                found: labels.len(),
            });
        }
    }
    let cc = complete_cases(&cols)?;
    let n = cc.rows.len();
    if n == 0 {
        return Err(StatError::EmptyInput(format!("no complete rows for `{}`", y.name)));
    }
    let yv = &cc.columns[0];
    for (i, &v) in yv.iter().enumerate() {
        if v < 0.0 || v.fract() != 0.0 {
            return Err(StatError::NonCount {
                column: y.name.clone(),
                row: cc.rows[i],
                value: v,
            });
        }
    }

    let mut transform_log = Vec::new();
    let mut terms = vec![INTERCEPT.to_string()];
    let mut xcols: Vec<Vec<f64>> = vec![vec![1.0; n]];

    let group_labels: Option<Vec<&str>> =
        group.map(|(_, labels)| cc.rows.iter().map(|&i| labels[i].as_str()).collect());
    if let (Some((gname, _)), Some(labels)) = (group, &group_labels) {
        let levels: BTreeSet<&str> = labels.iter().copied().collect();
        let levels: Vec<&str> = levels.into_iter().collect();
        transform_log.push(format!(
            "random intercept (1 | {gname}) approximated by fixed per-group intercepts; reference level `{}`",
            levels[0]
        ));
        for level in levels.iter().skip(1) {
            terms.push(format!("{gname}[{level}]"));
            xcols.push(labels.iter().map(|l| f64::from(u8::from(l == level))).collect());
        }
    }

    for (k, p) in predictors.iter().enumerate() {
        let values = &cc.columns[k + 1];
        if let Some(labels) = &group_labels {
            if constant_within_groups(values, labels) {
                transform_log.push(format!(
                    "`{}` is constant within every group and is absorbed by the group intercepts; dropped",
                    p.name
                ));
                continue;
            }
        }
        terms.push(p.name.clone());
        xcols.push(values.clone());
    }

    let p = terms.len();
    if n <= p {
        return Err(StatError::Underdetermined { n, terms: p });
    }
    let x = DMatrix::from_fn(n, p, |i, j| xcols[j][i]);
    let y_vec = DVector::from_column_slice(yv);

    // IRLS, started from mu = y + 0.1.
    let mut mu: DVector<f64> = y_vec.map(|v| v + 0.1);
    let mut eta: DVector<f64> = mu.map(f64::ln);
    let mut beta: Option<DVector<f64>> = None;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        let sw: DVector<f64> = mu.map(f64::sqrt);
        let z = DVector::from_fn(n, |i, _| eta[i] + (y_vec[i] - mu[i]) / mu[i]);
        let xw = DMatrix::from_fn(n, p, |i, j| x[(i, j)] * sw[i]);
        let zw = z.component_mul(&sw);
        let fit = least_squares(&xw, &zw, &terms)?;
        let next = fit.coefficients;
        eta = &x * &next;
        mu = eta.map(f64::exp);
        let done = beta
            .as_ref()
            .map(|prev| (&next - prev).amax() < opts.tolerance)
            .unwrap_or(false);
        beta = Some(next);
        if done {
            converged = true;
            break;
        }
        if mu.iter().any(|m| !m.is_finite() || *m == 0.0) {
            break;
        }
    }
    let beta = beta.expect("at least one iteration");

    let normal = Normal::standard();
    let sw: DVector<f64> = mu.map(f64::sqrt);
    let xw = DMatrix::from_fn(n, p, |i, j| x[(i, j)] * sw[i]);
    let cov = least_squares(&xw, &DVector::zeros(n), &terms)
        .map(|f| f.unscaled_cov)
        .unwrap_or_else(|_| DMatrix::from_element(p, p, f64::NAN));

    let mut coefficients = IndexMap::new();
    for (j, term) in terms.iter().enumerate() {
        let estimate = beta[j];
        let std_error = cov[(j, j)].sqrt();
        let z = ratio(estimate, std_error);
        let p_value = if z.is_nan() {
            f64::NAN
        } else {
            (2.0 * normal.sf(z.abs())).min(1.0)
        };
        coefficients.insert(
            term.clone(),
            TermEstimate {
                estimate,
                std_error,
                test_statistic: z,
                p_value,
            },
        );
    }

    let deviance: f64 = (0..n).map(|i| unit_deviance(y_vec[i], mu[i])).sum();
    let ybar = y_vec.mean();
    let null_deviance: f64 = y_vec.iter().map(|&v| unit_deviance(v, ybar)).sum();
    let residuals = (0..n)
        .map(|i| {
            let d = unit_deviance(y_vec[i], mu[i]).max(0.0).sqrt();
            if y_vec[i] >= mu[i] {
                d
            } else {
                -d
            }
        })
        .collect();

    let mut report = StatReport::empty(ModelKind::Poisson, &y.name);
    report.coefficients = coefficients;
    report.deviance = Some(deviance);
    report.null_deviance = Some(null_deviance);
    report.iterations = Some(iterations);
    report.converged = Some(converged);
    report.n_used = n;
    report.n_dropped = cc.dropped;
    report.df_residual = n - p;
    report.residuals = residuals;
    report.transform_log = transform_log;

    if converged {
        Ok(report)
    } else {
        Err(StatError::NotConverged {
            iterations,
            last: Box::new(report),
        })
    }
}

fn constant_within_groups(values: &[f64], labels: &[&str]) -> bool {
    let mut seen: IndexMap<&str, f64> = IndexMap::new();
    for (v, l) in values.iter().zip(labels) {
        match seen.get(l) {
            Some(first) if first != v => return false,
            Some(_) => {}
            None => {
                seen.insert(l, *v);
            }
        }
    }
    true
}
