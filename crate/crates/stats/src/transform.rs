use crate::column::DataColumn;
use crate::error::{StatError, StatResult};
use crate::summary::{mean, sample_sd};

/// Standardizes present values to mean 0 and sample standard deviation 1.
/// Missing entries stay missing.
pub fn zscore(column: &DataColumn) -> StatResult<DataColumn> {
    let present = column.present();
    if present.len() < 2 {
        return Err(StatError::DegenerateInput(format!(
            "`{}` needs at least 2 values to standardize, found {}",
            column.name,
            present.len()
        )));
    }
    let m = mean(&present);
    let sd = sample_sd(&present);
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(StatError::DegenerateInput(format!(
            "`{}` has zero variance",
            column.name
        )));
    }
    let values = (0..column.len())
        .map(|i| column.get(i).map(|v| (v - m) / sd))
        .collect();
    Ok(DataColumn::with_missing(column.name.clone(), values))
}

/// Elementwise `ln(x + 1)`.
pub fn log1p_transform(column: &DataColumn) -> StatResult<DataColumn> {
    let mut values = Vec::with_capacity(column.len());
    for row in 0..column.len() {
        match column.get(row) {
            Some(v) if v <= -1.0 => {
                return Err(StatError::DomainError {
                    column: column.name.clone(),
                    row,
                    value: v,
                    transform: "log(x + 1)",
                })
            }
            Some(v) => values.push(Some(v.ln_1p())),
            None => values.push(None),
        }
    }
    Ok(DataColumn::with_missing(column.name.clone(), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zscore_of_one_two_three() {
        let z = zscore(&DataColumn::new("x", vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(z.present(), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn zscore_rejects_constant_column() {
        let err = zscore(&DataColumn::new("x", vec![4.0; 5])).unwrap_err();
        assert!(matches!(err, StatError::DegenerateInput(_)));
    }

    #[test]
    fn zscore_keeps_missing() {
        let col = DataColumn::with_missing("x", vec![Some(1.0), None, Some(3.0)]);
        let z = zscore(&col).unwrap();
        assert_eq!(z.values[1], None);
        assert_eq!(z.present().len(), 2);
    }

    #[test]
    fn log1p_known_points() {
        let out = log1p_transform(&DataColumn::new("x", vec![0.0, std::f64::consts::E - 1.0])).unwrap();
        assert_eq!(out.values[0], Some(0.0));
        assert!((out.values[1].unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log1p_domain_error() {
        let err = log1p_transform(&DataColumn::new("x", vec![0.0, -1.0])).unwrap_err();
        assert!(matches!(err, StatError::DomainError { row: 1, .. }));
    }

    proptest! {
        #[test]
        fn zscore_has_unit_moments_and_is_idempotent(
            values in prop::collection::vec(-1e3f64..1e3, 2..60)
        ) {
            let col = DataColumn::new("x", values);
            prop_assume!(sample_sd(&col.present()) > 1e-6);
            let z = zscore(&col).unwrap();
            let zp = z.present();
            prop_assert!(mean(&zp).abs() < 1e-12);
            prop_assert!((sample_sd(&zp) - 1.0).abs() < 1e-12);
            let zz = zscore(&z).unwrap();
            for (a, b) in zp.iter().zip(zz.present()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn log1p_is_monotone(mut values in prop::collection::vec(0f64..1e6, 1..50)) {
            values.sort_by(f64::total_cmp);
            let out = log1p_transform(&DataColumn::new("x", values)).unwrap().present();
            prop_assert!(out.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
