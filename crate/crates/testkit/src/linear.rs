use statrs::function::beta::beta_reg;

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// OLS coefficients (intercept first) from the normal equations XᵀXβ = Xᵀy.
pub fn normal_equations(y: &[f64], predictors: &[Vec<f64>]) -> Vec<f64> {
    let n = y.len();
    let p = predictors.len() + 1;
    let row = |i: usize| -> Vec<f64> {
        std::iter::once(1.0)
            .chain(predictors.iter().map(|c| c[i]))
            .collect()
    };
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for i in 0..n {
        let r = row(i);
        for a in 0..p {
            xty[a] += r[a] * y[i];
            for b in 0..p {
                xtx[a][b] += r[a] * r[b];
            }
        }
    }
    solve(xtx, xty)
}

/// R² of an intercept model from its normal-equation coefficients.
pub fn r_squared(y: &[f64], predictors: &[Vec<f64>], beta: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let mut rss = 0.0;
    let mut tss = 0.0;
    for (i, yi) in y.iter().enumerate() {
        let fit = beta[0]
            + predictors
                .iter()
                .enumerate()
                .map(|(j, c)| beta[j + 1] * c[i])
                .sum::<f64>();
        rss += (yi - fit).powi(2);
        tss += (yi - mean).powi(2);
    }
    1.0 - rss / tss
}

/// Textbook raw-sum Pearson r with its two-sided p value through the
/// regularized incomplete beta function.
pub fn textbook_pearson(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let r = (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
    let df = n - 2.0;
    (r, t_two_sided(r, df))
}

/// Two-sided p of a correlation r on `df` degrees of freedom.
pub fn t_two_sided(r: f64, df: f64) -> f64 {
    let t2 = r * r * df / (1.0 - r * r);
    beta_reg(df / 2.0, 0.5, df / (df + t2))
}

/// First-order partial correlation from the three pairwise correlations.
pub fn recursive_partial(r_xy: f64, r_xz: f64, r_yz: f64) -> f64 {
    (r_xy - r_xz * r_yz) / ((1.0 - r_xz * r_xz) * (1.0 - r_yz * r_yz)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let x = solve(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]);
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
    }
}
