//! Configuration, orchestration and reporting for slab Casimir force runs.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod units;
pub mod verify;

pub use config::RunConfig;
pub use error::CliError;
