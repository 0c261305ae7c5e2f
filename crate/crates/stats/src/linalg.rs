use nalgebra::{DMatrix, DVector};

use crate::error::{StatError, StatResult};

/// Relative threshold below which a diagonal entry of R marks a column that
/// lies in the span of the preceding columns.
const RANK_TOL: f64 = 1e-10;

pub(crate) struct LeastSquares {
    pub coefficients: DVector<f64>,
    /// (XᵀX)⁻¹ of the (possibly weighted) design.
    pub unscaled_cov: DMatrix<f64>,
    pub fitted: DVector<f64>,
}

/// Builds an n×p matrix from column vectors.
pub(crate) fn design(columns: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i])
}

/// Least squares via Householder QR. `terms` names the columns so a
/// collinear column can be reported.
pub(crate) fn least_squares(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    terms: &[String],
) -> StatResult<LeastSquares> {
    let (n, p) = x.shape();
    if n < p {
        return Err(StatError::Underdetermined { n, terms: p });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..p {
        let norm = x.column(j).norm();
        if norm == 0.0 || r[(j, j)].abs() <= RANK_TOL * norm {
            return Err(StatError::RankDeficient {
                term: terms[j].clone(),
            });
        }
    }
    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, p).into_owned();
    let coefficients = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| StatError::RankDeficient {
            term: terms.last().cloned().unwrap_or_default(),
        })?;
    let rinv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| StatError::RankDeficient {
            term: terms.last().cloned().unwrap_or_default(),
        })?;
    let unscaled_cov = &rinv * rinv.transpose();
    let fitted = x * &coefficients;
    Ok(LeastSquares {
        coefficients,
        unscaled_cov,
        fitted,
    })
}
