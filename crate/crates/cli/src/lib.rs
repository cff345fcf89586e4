//! Batch front end: configuration, pipelines, reproducible outputs and the
//! acceptance suite.

pub mod config;
pub mod output;
pub mod run;
pub mod suite;
