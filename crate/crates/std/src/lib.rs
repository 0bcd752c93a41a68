//! File formats, reports and the command implementations behind the
//! `dilute` binary. The numerics live in `dilute-core`.

pub mod budget;
pub mod commands;
pub mod error;
pub mod grid;
pub mod potential_file;
pub mod records;
pub mod verify;

pub use error::{exit, CliError, Result};
