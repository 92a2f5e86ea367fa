//! File formats, Monte Carlo studies and the `truncstat` command line on
//! top of [`truncstat_core`].

pub mod cli;
pub mod csv_input;
pub mod error;
pub mod report;
pub mod study;

pub use error::{ConfigError, Error, InputError};
