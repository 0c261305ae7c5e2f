use indexmap::IndexMap;
use nalgebra::DVector;
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use crate::column::{complete_cases, DataColumn};
use crate::error::{StatError, StatResult};
use crate::linalg::{design, least_squares};
use crate::report::{FTest, ModelKind, StatReport, TermEstimate};

pub const INTERCEPT: &str = "(Intercept)";

#[derive(Debug, Clone, Copy)]
pub struct OlsOptions {
    pub intercept: bool,
}

impl Default for OlsOptions {
    fn default() -> Self {
        Self { intercept: true }
    }
}

/// Two-sided p value of a t statistic.
pub(crate) fn t_p_value(t: f64, df: f64) -> f64 {
    if t.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Ratio guarded against a zero standard error (exact fits).
pub(crate) fn ratio(estimate: f64, std_error: f64) -> f64 {
    if std_error > 0.0 {
        estimate / std_error
    } else if estimate == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(estimate)
    }
}

/// Ordinary least squares of `y` on `predictors`.
pub fn ols(y: &DataColumn, predictors: &[DataColumn], opts: OlsOptions) -> StatResult<StatReport> {
    let mut cols: Vec<&DataColumn> = vec![y];
    cols.extend(predictors.iter());
    let cc = complete_cases(&cols)?;
    let n = cc.rows.len();

    let mut terms = Vec::new();
    let mut xcols = Vec::new();
    if opts.intercept {
        terms.push(INTERCEPT.to_string());
        xcols.push(vec![1.0; n]);
    }
    for (k, p) in predictors.iter().enumerate() {
        terms.push(p.name.clone());
        xcols.push(cc.columns[k + 1].clone());
    }
    let p = terms.len();
    if p == 0 {
        return Err(StatError::DegenerateInput("model has no terms".into()));
    }
    if n <= p {
        return Err(StatError::Underdetermined { n, terms: p });
    }

    let yv = DVector::from_vec(cc.columns[0].clone());
    let x = design(&xcols, n);
    let fit = least_squares(&x, &yv, &terms)?;

    let residuals: Vec<f64> = (0..n).map(|i| yv[i] - fit.fitted[i]).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let df_resid = n - p;
    let sigma2 = rss / df_resid as f64;

    let tss = if opts.intercept {
        let m = yv.mean();
        yv.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
    } else {
        yv.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { f64::NAN };
    let df_int = usize::from(opts.intercept);
    let adj_r_squared = 1.0 - (1.0 - r_squared) * ((n - df_int) as f64 / df_resid as f64);

    let mut coefficients = IndexMap::new();
    for (j, term) in terms.iter().enumerate() {
        let estimate = fit.coefficients[j];
        let std_error = (sigma2 * fit.unscaled_cov[(j, j)]).sqrt();
        let t = ratio(estimate, std_error);
        coefficients.insert(
            term.clone(),
            TermEstimate {
                estimate,
                std_error,
                test_statistic: t,
                p_value: t_p_value(t, df_resid as f64),
            },
        );
    }

    let df_model = p - df_int;
    let f_statistic = (df_model > 0).then(|| {
        let value = ((tss - rss) / df_model as f64) / sigma2;
        let p = if value.is_infinite() {
            0.0
        } else if value.is_nan() {
            f64::NAN
        } else {
            FisherSnedecor::new(df_model as f64, df_resid as f64)
                .map(|d| d.sf(value.max(0.0)))
                .unwrap_or(f64::NAN)
        };
        FTest {
            value,
            df_model,
            df_residual: df_resid,
            p,
        }
    });

    let mut report = StatReport::empty(ModelKind::Ols, &y.name);
    report.coefficients = coefficients;
    report.r_squared = Some(r_squared);
    report.adj_r_squared = Some(adj_r_squared);
    report.f_statistic = f_statistic;
    report.n_used = n;
    report.n_dropped = cc.dropped;
    report.df_residual = df_resid;
    report.residuals = residuals;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_is_recovered() {
        let x = DataColumn::new("x", vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        let y = DataColumn::new("y", vec![1.0, 3.0, 5.0, 7.0, 9.0]);
        let rep = ols(&y, &[x], OlsOptions::default()).unwrap();
        assert!((rep.estimate(INTERCEPT).unwrap() - 1.0).abs() < 1e-12);
        assert!((rep.estimate("x").unwrap() - 2.0).abs() < 1e-12);
        assert!((rep.r_squared.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_covariance_gives_flat_fit() {
        // x symmetric around its mean, y symmetric in x: sample covariance 0.
        let x = DataColumn::new("x", vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        let y = DataColumn::new("y", vec![4.0, 1.0, 0.0, 1.0, 4.0]);
        let rep = ols(&y, &[x], OlsOptions::default()).unwrap();
        assert!(rep.estimate("x").unwrap().abs() < 1e-12);
        assert!(rep.r_squared.unwrap().abs() < 1e-12);
        let f = rep.f_statistic.unwrap();
        assert!((f.p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn collinear_predictor_is_named() {
        let a = DataColumn::new("a", vec![1.0, 2.0, 3.0, 4.0, 6.0]);
        let b = DataColumn::new("twice_a", vec![2.0, 4.0, 6.0, 8.0, 12.0]);
        let y = DataColumn::new("y", vec![1.0, 0.0, 2.0, 5.0, 3.0]);
        match ols(&y, &[a, b], OlsOptions::default()) {
            Err(StatError::RankDeficient { term }) => assert_eq!(term, "twice_a"),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        let x = DataColumn::new("x", vec![1.0, 2.0]);
        let y = DataColumn::new("y", vec![1.0, 2.0]);
        assert!(matches!(
            ols(&y, &[x], OlsOptions::default()),
            Err(StatError::Underdetermined { n: 2, terms: 2 })
        ));
    }

    #[test]
    fn missing_rows_are_dropped_and_counted() {
        let x = DataColumn::with_missing("x", vec![Some(0.0), Some(1.0), None, Some(3.0), Some(4.0)]);
        let y = DataColumn::new("y", vec![1.0, 3.2, 100.0, 6.9, 9.1]);
        let rep = ols(&y, &[x], OlsOptions::default()).unwrap();
        assert_eq!(rep.n_used, 4);
        assert_eq!(rep.n_dropped, 1);
        assert_eq!(rep.residuals.len(), 4);
    }

    #[test]
    fn no_intercept_uses_uncentered_r2() {
        let x = DataColumn::new("x", vec![1.0, 2.0, 3.0, 4.0]);
        let y = DataColumn::new("y", vec![2.1, 3.9, 6.2, 7.8]);
        let rep = ols(&y, &[x], OlsOptions { intercept: false }).unwrap();
        assert!(rep.term(INTERCEPT).is_none());
        assert!(rep.r_squared.unwrap() > 0.99);
        assert_eq!(rep.df_residual, 3);
    }
}
