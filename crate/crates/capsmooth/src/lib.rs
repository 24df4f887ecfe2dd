//! Monte Carlo verification, report writers and the command-line front end
//! for `capsmooth-core`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod montecarlo;
pub mod profile;
pub mod report;
pub mod verify;

pub use error::{CliError, Result};
