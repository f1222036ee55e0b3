//! Command-line front end: argument parsing, configuration and report output
//! for the `qdeform` verification engines.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use cli::run;
