//! Command-line front end for `magnus-core`.
//!
//! The parsers in [`units`] and [`config`] are public so they can be fuzzed
//! and reused.

pub mod app;
pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod selfcheck;
pub mod units;

pub use error::{exit, CliError};
