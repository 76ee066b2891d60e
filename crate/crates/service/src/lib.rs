//! HTTP API and batch command line around `praise-core`.

pub mod api;
pub mod cli;
pub mod evaluation;
