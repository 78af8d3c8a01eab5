//! Experiments and output.

pub mod config;
pub mod metrics;
pub mod problem;
pub mod properties;
pub mod run;
pub mod svg;
