//! Repository mining toolkit computing SPACE developer-productivity
//! dimensions (satisfaction, performance, activity, communication,
//! efficiency) from git histories and forge snapshots.

pub mod cleaning;
pub mod communication;
pub mod cps;
pub mod fixtures;
pub mod forge;
pub mod format;
pub mod identity;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod sentiment;
pub mod table;
pub mod time;

mod text;
