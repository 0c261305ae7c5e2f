//! Deserializers that read JSON `null` back as NaN, since JSON has no
//! representation for non-finite floats.

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer};

fn nan(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Option::<f64>::deserialize(d).map(nan)
}

pub fn deserialize_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    Ok(Vec::<Option<f64>>::deserialize(d)?.into_iter().map(nan).collect())
}

pub fn deserialize_matrix<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
    Ok(Vec::<Vec<Option<f64>>>::deserialize(d)?
        .into_iter()
        .map(|r| r.into_iter().map(nan).collect())
        .collect())
}

pub fn deserialize_map<'de, D: Deserializer<'de>>(d: D) -> Result<IndexMap<String, f64>, D::Error> {
    Ok(IndexMap::<String, Option<f64>>::deserialize(d)?
        .into_iter()
        .map(|(k, v)| (k, nan(v)))
        .collect())
}

#[cfg(test)]
mod tests {
    use crate::TermEstimate;

    #[test]
    fn null_reads_as_nan() {
        let t: TermEstimate =
            serde_json::from_str(r#"{"estimate":1.0,"std_error":null,"test_statistic":null,"p_value":0.5}"#).unwrap();
        assert!(t.std_error.is_nan());
        assert_eq!(t.p_value, 0.5);
    }
}
