//! Composite Productivity Score: per-dimension z-scores combined by a
//! weighted sum.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use spacex_stats::{mean, sample_sd};
use thiserror::Error;

use crate::format::{fixed, fixed_opt};
use crate::metrics::AuthorProjectRow;

pub const DIMENSIONS: [&str; 5] = ["satisfaction", "performance", "activity", "communication", "efficiency"];

#[derive(Debug, Error, PartialEq)]
pub enum CpsError {
    #[error("no dimension could be standardized")]
    AllDegenerate,
    #[error("no dimension present")]
    NoDimensions,
    #[error("weights must be non-negative with a positive sum")]
    InvalidWeights,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DimensionVector {
    pub satisfaction: Option<f64>,
    pub performance: Option<f64>,
    pub activity: Option<f64>,
    pub communication: Option<f64>,
    pub efficiency: Option<f64>,
}

impl DimensionVector {
    pub fn from_array(v: [Option<f64>; 5]) -> Self {
        Self {
            satisfaction: v[0],
            performance: v[1],
            activity: v[2],
            communication: v[3],
            efficiency: v[4],
        }
    }

    pub fn to_array(&self) -> [Option<f64>; 5] {
        [
            self.satisfaction,
            self.performance,
            self.activity,
            self.communication,
            self.efficiency,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(pub [f64; 5]);

impl Default for WeightVector {
    fn default() -> Self {
        Self([0.2; 5])
    }
}

impl WeightVector {
    pub fn validate(&self) -> Result<(), CpsError> {
        let ok = self.0.iter().all(|w| w.is_finite() && *w >= 0.0) && self.0.iter().sum::<f64>() > 0.0;
        ok.then_some(()).ok_or(CpsError::InvalidWeights)
    }

    pub fn normalized(&self) -> Result<WeightVector, CpsError> {
        self.validate()?;
        let s: f64 = self.0.iter().sum();
        Ok(WeightVector(self.0.map(|w| w / s)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub vectors: Vec<DimensionVector>,
    /// Dimensions removed population-wide.
    pub dropped: Vec<&'static str>,
    pub warnings: Vec<String>,
}

/// Z-scores each dimension across the population (sample sd). A dimension
/// with fewer than two values or zero spread is dropped for everyone.
pub fn standardize_dimensions(vectors: &[DimensionVector]) -> Result<Standardized, CpsError> {
    let arrays: Vec<[Option<f64>; 5]> = vectors.iter().map(DimensionVector::to_array).collect();
    let mut out: Vec<[Option<f64>; 5]> = vec![[None; 5]; vectors.len()];
    let mut dropped = Vec::new();
    let mut warnings = Vec::new();
    for (d, name) in DIMENSIONS.iter().enumerate() {
        let present: Vec<f64> = arrays.iter().filter_map(|a| a[d]).collect();
        let sd = if present.len() >= 2 { sample_sd(&present) } else { 0.0 };
        if present.len() < 2 || sd == 0.0 || !sd.is_finite() {
            dropped.push(*name);
            warnings.push(format!(
                "dimension {name} dropped: {} value(s), no spread to standardize",
                present.len()
            ));
            continue;
        }
        let m = mean(&present);
        for (row, a) in arrays.iter().enumerate() {
            out[row][d] = a[d].map(|x| (x - m) / sd);
        }
    }
    if dropped.len() == DIMENSIONS.len() {
        return Err(CpsError::AllDegenerate);
    }
    Ok(Standardized {
        vectors: out.into_iter().map(DimensionVector::from_array).collect(),
        dropped,
        warnings,
    })
}

/// Σ w_i·Z_i over present dimensions, weights renormalized over them.
/// Returns the score and the weights actually applied.
pub fn composite_score(v: &DimensionVector, w: &WeightVector) -> Result<(f64, [f64; 5]), CpsError> {
    w.validate()?;
    let z = v.to_array();
    let mass: f64 = z.iter().zip(w.0).filter(|(z, _)| z.is_some()).map(|(_, w)| w).sum();
    if z.iter().all(Option::is_none) || mass <= 0.0 {
        return Err(CpsError::NoDimensions);
    }
    let mut used = [0.0; 5];
    let mut score = 0.0;
    for i in 0..5 {
        if let Some(zi) = z[i] {
            used[i] = w.0[i] / mass;
            score += used[i] * zi;
        }
    }
    Ok((score, used))
}

/// Per-author raw dimension scalars under the default scoring profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringProfile {
    /// Share of log churn in the activity score; the rest is log commits.
    pub activity_churn_share: f64,
}

impl Default for ScoringProfile {
    fn default() -> Self {
        Self {
            activity_churn_share: 0.5,
        }
    }
}

/// satisfaction = −negative %, performance = −bug-fix share, activity =
/// blend of log1p churn and log1p commits, communication = CIF
/// participation, efficiency = −mean commit gap.
pub fn raw_dimensions(
    row: &AuthorProjectRow,
    participation: Option<f64>,
    profile: &ScoringProfile,
) -> DimensionVector {
    let share = profile.activity_churn_share;
    DimensionVector {
        satisfaction: Some(-row.negative_commit_pct),
        performance: (row.total_commits > 0).then(|| -(row.bug_fix_commits as f64 / row.total_commits as f64)),
        activity: Some(share * (row.code_churn as f64).ln_1p() + (1.0 - share) * (row.total_commits as f64).ln_1p()),
        communication: participation,
        efficiency: row.mean_commit_gap_hours.map(|g| -g),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpsRow {
    pub project_name: String,
    pub canonical_id: String,
    pub z: DimensionVector,
    pub cps: f64,
    pub weights_used: [f64; 5],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpsTable {
    pub rows: Vec<CpsRow>,
    pub dropped: Vec<&'static str>,
    pub warnings: Vec<String>,
    pub weights: WeightVector,
}

/// Scores a population of author rows. `participation` is keyed by
/// (project, canonical id).
pub fn score_population(
    rows: &[AuthorProjectRow],
    participation: &BTreeMap<(String, String), f64>,
    weights: &WeightVector,
    profile: &ScoringProfile,
) -> Result<CpsTable, CpsError> {
    let weights = weights.normalized()?;
    let raw: Vec<DimensionVector> = rows
        .iter()
        .map(|r| {
            let p = participation
                .get(&(r.project_name.clone(), r.canonical_id.clone()))
                .copied();
            raw_dimensions(r, p, profile)
        })
        .collect();
    let std = standardize_dimensions(&raw)?;
    let mut out = Vec::with_capacity(rows.len());
    for (r, z) in rows.iter().zip(&std.vectors) {
        let (cps, used) = composite_score(z, &weights)?;
        out.push(CpsRow {
            project_name: r.project_name.clone(),
            canonical_id: r.canonical_id.clone(),
            z: *z,
            cps,
            weights_used: used,
        });
    }
    Ok(CpsTable {
        rows: out,
        dropped: std.dropped,
        warnings: std.warnings,
        weights,
    })
}

pub const CPS_HEADER: [&str; 9] = [
    "project",
    "author",
    "z_satisfaction",
    "z_performance",
    "z_activity",
    "z_communication",
    "z_efficiency",
    "cps",
    "weights_used",
];

pub fn write_cps_csv<W: Write>(out: W, rows: &[CpsRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CPS_HEADER)?;
    for r in rows {
        let z = r.z.to_array();
        let mut rec = vec![r.project_name.clone(), r.canonical_id.clone()];
        rec.extend(z.iter().map(|v| fixed_opt(*v)));
        rec.push(fixed(r.cps));
        rec.push(r.weights_used.iter().map(|w| fixed(*w)).collect::<Vec<_>>().join(";"));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn only(d: usize, v: f64) -> DimensionVector {
        let mut a = [Some(0.0); 5];
        a[d] = Some(v);
        DimensionVector::from_array(a)
    }

    #[test]
    fn composite_examples() {
        let zero = DimensionVector::from_array([Some(0.0); 5]);
        assert_eq!(composite_score(&zero, &WeightVector([3.0, 1.0, 0.0, 2.0, 5.0])).unwrap().0, 0.0);
        let w = WeightVector([1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(composite_score(&only(0, 2.0), &w).unwrap().0, 2.0);
        let ones = DimensionVector::from_array([Some(1.0); 5]);
        assert!((composite_score(&ones, &WeightVector::default()).unwrap().0 - 1.0).abs() < 1e-15);
        assert_eq!(composite_score(&DimensionVector::default(), &w), Err(CpsError::NoDimensions));
    }

    #[test]
    fn renormalizes_over_present() {
        let v = DimensionVector::from_array([Some(2.0), None, Some(4.0), None, None]);
        let (s, used) = composite_score(&v, &WeightVector::default()).unwrap();
        assert!((s - 3.0).abs() < 1e-15);
        assert_eq!(used, [0.5, 0.0, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn two_point_standardization() {
        let pop = vec![
            DimensionVector::from_array([Some(0.0), Some(1.0), Some(3.0), Some(5.0), Some(7.0)]),
            DimensionVector::from_array([Some(10.0), Some(1.0), Some(4.0), Some(6.0), Some(8.0)]),
        ];
        let s = standardize_dimensions(&pop).unwrap();
        let half = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.vectors[0].satisfaction.unwrap() + half).abs() < 1e-4);
        assert!((s.vectors[1].satisfaction.unwrap() - half).abs() < 1e-4);
        assert_eq!(s.dropped, vec!["performance"]);
        assert_eq!(s.warnings.len(), 1);
        assert!(s.vectors[0].performance.is_none());
    }

    #[test]
    fn all_degenerate() {
        let pop = vec![DimensionVector::from_array([Some(1.0); 5]); 3];
        assert_eq!(standardize_dimensions(&pop), Err(CpsError::AllDegenerate));
    }

    #[test]
    fn invalid_weights() {
        assert_eq!(WeightVector([0.0; 5]).validate(), Err(CpsError::InvalidWeights));
        assert_eq!(WeightVector([-1.0, 1.0, 1.0, 1.0, 1.0]).validate(), Err(CpsError::InvalidWeights));
    }
}
