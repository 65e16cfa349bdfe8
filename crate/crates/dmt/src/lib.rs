//! Sweeps, file formats and the command-line front end for `dmt-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod corrfile;
pub mod emit;
mod error;
pub mod grid;
pub mod parallel;
pub mod record;
pub mod sweep;

pub use error::{CliError, ExitCode};
