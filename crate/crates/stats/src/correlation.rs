use serde::{Deserialize, Serialize};

use crate::column::{complete_cases, DataColumn};
use crate::error::{StatError, StatResult};
use crate::ols::{ols, t_p_value, OlsOptions};
use crate::report::{ModelKind, StatReport, TermEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    pub p: f64,
    pub n: usize,
    /// Degrees of freedom of the t test.
    pub df: usize,
    pub t: f64,
}

impl Correlation {
    /// Wraps the correlation as a one-term report; the term's standard error
    /// is sqrt((1 − r²)/df).
    pub fn into_report(self, kind: ModelKind, response: &str, term: &str, n_dropped: usize) -> StatReport {
        let mut report = StatReport::empty(kind, response);
        let se = if self.df > 0 {
            ((1.0 - self.r * self.r).max(0.0) / self.df as f64).sqrt()
        } else {
            f64::NAN
        };
        report.coefficients.insert(
            term.to_string(),
            TermEstimate {
                estimate: self.r,
                std_error: se,
                test_statistic: self.t,
                p_value: self.p,
            },
        );
        report.n_used = self.n;
        report.n_dropped = n_dropped;
        report.df_residual = self.df;
        report
    }
}

fn r_of(x: &[f64], y: &[f64]) -> StatResult<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if !(sxx > 0.0) || !(syy > 0.0) {
        return Err(StatError::DegenerateInput("constant column in correlation".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn with_test(r: f64, n: usize, df: usize) -> Correlation {
    let t = if r.abs() == 1.0 {
        f64::INFINITY.copysign(r)
    } else {
        r * (df as f64 / (1.0 - r * r)).sqrt()
    };
    Correlation {
        r,
        p: t_p_value(t, df as f64),
        n,
        df,
        t,
    }
}

/// Pearson correlation with a two-sided t test on n - 2 degrees of freedom.
pub fn pearson(x: &DataColumn, y: &DataColumn) -> StatResult<Correlation> {
    let cc = complete_cases(&[x, y])?;
    let n = cc.rows.len();
    if n < 3 {
        return Err(StatError::DegenerateInput(format!(
            "pearson({}, {}) needs at least 3 complete pairs, found {n}",
            x.name, y.name
        )));
    }
    let r = r_of(&cc.columns[0], &cc.columns[1])?;
    Ok(with_test(r, n, n - 2))
}

/// Residual-method partial correlation of `x` and `y` given `controls`.
/// The test uses n - 2 - k degrees of freedom for k controls.
pub fn partial_correlation(
    x: &DataColumn,
    y: &DataColumn,
    controls: &[DataColumn],
) -> StatResult<Correlation> {
    if controls.is_empty() {
        return pearson(x, y);
    }
    let mut cols: Vec<&DataColumn> = vec![x, y];
    cols.extend(controls.iter());
    let cc = complete_cases(&cols)?;
    let n = cc.rows.len();
    let k = controls.len();
    if n < k + 3 {
        return Err(StatError::DegenerateInput(format!(
            "partial correlation with {k} controls needs at least {} complete rows, found {n}",
            k + 3
        )));
    }
    let ctrl: Vec<DataColumn> = controls
        .iter()
        .enumerate()
        .map(|(j, c)| DataColumn::new(c.name.clone(), cc.columns[j + 2].clone()))
        .collect();
    let rx = ols(
        &DataColumn::new(x.name.clone(), cc.columns[0].clone()),
        &ctrl,
        OlsOptions::default(),
    )?
    .residuals;
    let ry = ols(
        &DataColumn::new(y.name.clone(), cc.columns[1].clone()),
        &ctrl,
        OlsOptions::default(),
    )?
    .residuals;
    let r = r_of(&rx, &ry)?;
    Ok(with_test(r, n, n - 2 - k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_positive_and_negative() {
        let x = DataColumn::new("x", vec![1.0, 2.0, 3.0]);
        let up = pearson(&x, &DataColumn::new("y", vec![2.0, 4.0, 6.0])).unwrap();
        assert_eq!(up.r, 1.0);
        assert_eq!(up.p, 0.0);
        let down = pearson(&x, &DataColumn::new("y", vec![3.0, 2.0, 1.0])).unwrap();
        assert_eq!(down.r, -1.0);
    }

    #[test]
    fn degenerate_inputs() {
        let x = DataColumn::new("x", vec![1.0, 2.0, 3.0]);
        let c = DataColumn::new("c", vec![5.0, 5.0, 5.0]);
        assert!(matches!(pearson(&x, &c), Err(StatError::DegenerateInput(_))));
        let short = DataColumn::new("s", vec![1.0, 2.0]);
        assert!(matches!(pearson(&short, &short), Err(StatError::DegenerateInput(_))));
    }

    #[test]
    fn empty_controls_is_pearson() {
        let x = DataColumn::with_missing("x", vec![Some(1.0), Some(2.5), None, Some(4.0), Some(3.0)]);
        let y = DataColumn::new("y", vec![2.0, 1.0, 7.0, 5.0, 4.5]);
        assert_eq!(partial_correlation(&x, &y, &[]).unwrap(), pearson(&x, &y).unwrap());
    }

    #[test]
    fn variable_with_itself_given_controls() {
        let x = DataColumn::new("x", vec![1.0, 4.0, 2.0, 8.0, 5.0, 7.0]);
        let z = DataColumn::new("z", vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0]);
        let pc = partial_correlation(&x, &x, &[z]).unwrap();
        assert!((pc.r - 1.0).abs() < 1e-12);
        assert_eq!(pc.df, 3);
    }

    #[test]
    fn known_p_value() {
        // r = 0.5 with n = 12: t = 0.5 * sqrt(10 / 0.75), two-sided p = 0.0978546 (scipy.stats.t.sf).
        let c = with_test(0.5, 12, 10);
        assert!((c.t - 1.825_741_858_350_553_7).abs() < 1e-12);
        assert!((c.p - 0.097_854_614_257_812_46).abs() < 1e-9);
    }
}
