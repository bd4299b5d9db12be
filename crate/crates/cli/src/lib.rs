//! Command-line surface and local scoring service for `riskfuse-core`.

pub mod commands;
pub mod error;
pub mod fmt17;
pub mod manifest;
pub mod pipeline;
pub mod replica;
pub mod request;
pub mod scoring;
pub mod service;

pub use error::CliError;
pub use scoring::{ModelName, RiskFactorsInput, Scorer};
