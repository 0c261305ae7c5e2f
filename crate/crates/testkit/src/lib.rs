//! Test oracles for spacex.
//!
//! Everything here is written against plain data (slices, tuples, strings)
//! and deliberately avoids the production code paths it is used to check:
//! normal equations instead of QR, raw-sum correlation formulas instead of
//! centered two-pass sums, quadratic scans instead of per-file sweeps.

pub mod cleaning;
pub mod history;
pub mod linear;
pub mod provenance;
