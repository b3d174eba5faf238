//! Command-line front end for the wall solver: flag parsing, profile and
//! report persistence, sweep orchestration, and plot-ready data emission.

pub mod config;
pub mod error;
pub mod io;
pub mod run;

pub use config::Cli;
pub use error::CliError;
