use serde::{Deserialize, Serialize};

use crate::error::{StatError, StatResult};

/// A named numeric column. `None` (and NaN) mark missing values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataColumn {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

impl DataColumn {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn with_missing(name: impl Into<String>, values: Vec<Option<f64>>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at `row`, treating NaN as missing.
    pub fn get(&self, row: usize) -> Option<f64> {
        self.values
            .get(row)
            .copied()
            .flatten()
            .filter(|v| !v.is_nan())
    }

    /// Present values in row order.
    pub fn present(&self) -> Vec<f64> {
        (0..self.len()).filter_map(|i| self.get(i)).collect()
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            values: self.values.clone(),
        }
    }
}

/// Listwise-complete view over several columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CompleteCases {
    /// Indices (into the original columns) of the rows that were kept.
    pub rows: Vec<usize>,
    /// One vector per input column, restricted to `rows`.
    pub columns: Vec<Vec<f64>>,
    pub dropped: usize,
}

/// Keeps rows where every column has a value.
pub fn complete_cases(columns: &[&DataColumn]) -> StatResult<CompleteCases> {
    let n = columns.first().map_or(0, |c| c.len());
    for c in columns {
        if c.len() != n {
            return Err(StatError::LengthMismatch {
                column: c.name.clone(),
                expected: n,
                found: c.len(),
            });
        }
    }
    let rows: Vec<usize> = (0..n)
        .filter(|&i| columns.iter().all(|c| c.get(i).is_some()))
        .collect();
    let out = columns
        .iter()
        .map(|c| rows.iter().map(|&i| c.get(i).unwrap_or(f64::NAN)).collect())
        .collect();
    Ok(CompleteCases {
        dropped: n - rows.len(),
        rows,
        columns: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_rows_missing_anywhere() {
        let a = DataColumn::with_missing("a", vec![Some(1.0), None, Some(3.0), Some(4.0)]);
        let b = DataColumn::with_missing("b", vec![Some(1.0), Some(2.0), Some(f64::NAN), Some(5.0)]);
        let cc = complete_cases(&[&a, &b]).unwrap();
        assert_eq!(cc.rows, vec![0, 3]);
        assert_eq!(cc.dropped, 2);
        assert_eq!(cc.columns[1], vec![1.0, 5.0]);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let a = DataColumn::new("a", vec![1.0, 2.0]);
        let b = DataColumn::new("b", vec![1.0]);
        assert!(matches!(
            complete_cases(&[&a, &b]),
            Err(StatError::LengthMismatch { .. })
        ));
    }
}
