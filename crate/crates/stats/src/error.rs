use thiserror::Error;

use crate::report::StatReport;

pub type StatResult<T> = Result<T, StatError>;

#[derive(Debug, Error)]
pub enum StatError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("design matrix is rank deficient: `{term}` is a linear combination of earlier terms")]
    RankDeficient { term: String },

    #[error("underdetermined system: {n} complete rows for {terms} terms")]
    Underdetermined { n: usize, terms: usize },

    #[error("response `{column}` is not a count at row {row}: {value}")]
    NonCount { column: String, row: usize, value: f64 },

    #[error("IRLS did not converge after {iterations} iterations")]
    NotConverged {
        iterations: usize,
        last: Box<StatReport>,
    },

    #[error("value {value} at row {row} of `{column}` is outside the domain of {transform}")]
    DomainError {
        column: String,
        row: usize,
        value: f64,
        transform: &'static str,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("column `{column}` has {found} rows, expected {expected}")]
    LengthMismatch {
        column: String,
        expected: usize,
        found: usize,
    },
}
