//! Verification and benchmarking tools: an exhaustive oracle for tiny
//! instances, seeded benchmark records and performance profiles.

pub mod bench;
pub mod oracle;
pub mod profile;

pub use bench::{aggregate, geometric_mean, run_bench, BenchPlan, BenchRow, RunConfig, RunRecord};
pub use oracle::{optimal_mapping, OracleResult};
pub use profile::{performance_profile, Profile, ProfilePoint, QualityTable};
