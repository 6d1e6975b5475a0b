//! Library half of the `khessian` binary: problem-file parsing and the
//! subcommand bodies.

pub mod commands;
pub mod config;
