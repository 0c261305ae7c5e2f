//! Statistical routines for repository-mining analyses.
//!
//! Every fit works on the complete-case subset of its input columns and
//! returns a [`StatReport`] (or a small correlation record) that can be
//! serialized as JSON with a stable key order.

mod column;
mod correlation;
mod error;
mod linalg;
mod ols;
mod poisson;
mod report;
pub mod serde_float;
mod summary;
mod transform;
mod vif;

pub use column::{complete_cases, CompleteCases, DataColumn};
pub use correlation::{partial_correlation, pearson, Correlation};
pub use error::{StatError, StatResult};
pub use ols::{ols, OlsOptions, INTERCEPT};
pub use poisson::{poisson_fit, PoissonOptions};
pub use report::{FTest, ModelKind, StatReport, TermEstimate};
pub use summary::{mean, quantile_sorted, quantile_type7, sample_sd};
pub use transform::{log1p_transform, zscore};
pub use vif::vif;

/// Significance level used when reports flag a result as significant.
pub const ALPHA: f64 = 0.05;
