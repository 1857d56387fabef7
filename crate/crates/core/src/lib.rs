//! Seeded simulation of dual-path redundant transmission over a four-level
//! nodal network under tap, corrupt and sever attacks.
//!
//! Numeric summaries are generic over [`Scalar`]; the aliases below fix the
//! two common float widths.

pub mod adversary;
pub mod config;
mod error;
pub mod experiment;
pub mod metrics;
pub mod protocol;
pub mod rng;
mod scalar;
pub mod topology;

pub use error::SimError;
pub use experiment::{run_experiment, ExperimentOutput};
pub use scalar::Scalar;

pub type RiskModelF64 = protocol::RiskModel<f64>;
pub type RiskModelF32 = protocol::RiskModel<f32>;
pub type BoxStatsF64 = metrics::BoxStats<f64>;
pub type BoxStatsF32 = metrics::BoxStats<f32>;
pub type ComparisonReportF64 = metrics::ComparisonReport<f64>;
pub type ComparisonReportF32 = metrics::ComparisonReport<f32>;
