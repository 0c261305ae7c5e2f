use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Pearson,
    Ols,
    PartialCorr,
    Poisson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    #[serde(deserialize_with = "crate::serde_float::deserialize")]
    pub estimate: f64,
    #[serde(deserialize_with = "crate::serde_float::deserialize")]
    pub std_error: f64,
    /// t for least squares and correlations, z for Poisson.
    #[serde(deserialize_with = "crate::serde_float::deserialize")]
    pub test_statistic: f64,
    #[serde(deserialize_with = "crate::serde_float::deserialize")]
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FTest {
    #[serde(deserialize_with = "crate::serde_float::deserialize")]
    pub value: f64,
    pub df_model: usize,
    pub df_residual: usize,
    #[serde(deserialize_with = "crate::serde_float::deserialize")]
    pub p: f64,
}

/// Output of a fitted model. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub model_kind: ModelKind,
    pub response: String,
    pub coefficients: IndexMap<String, TermEstimate>,
    pub r_squared: Option<f64>,
    pub adj_r_squared: Option<f64>,
    pub f_statistic: Option<FTest>,
    pub deviance: Option<f64>,
    pub null_deviance: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub n_used: usize,
    pub n_dropped: usize,
    pub df_residual: usize,
    #[serde(deserialize_with = "crate::serde_float::deserialize_vec")]
    pub residuals: Vec<f64>,
    pub transform_log: Vec<String>,
}

impl StatReport {
    pub(crate) fn empty(model_kind: ModelKind, response: &str) -> Self {
        Self {
            model_kind,
            response: response.to_string(),
            coefficients: IndexMap::new(),
            r_squared: None,
            adj_r_squared: None,
            f_statistic: None,
            deviance: None,
            null_deviance: None,
            iterations: None,
            converged: None,
            n_used: 0,
            n_dropped: 0,
            df_residual: 0,
            residuals: Vec::new(),
            transform_log: Vec::new(),
        }
    }

    pub fn term(&self, name: &str) -> Option<&TermEstimate> {
        self.coefficients.get(name)
    }

    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.term(name).map(|t| t.estimate)
    }
}
