//! Command-line front end for `nls-scatter-core`.
//!
//! Exit statuses: 0 success, 1 failed checks or output I/O, 2 invalid input,
//! 3 when every point of a sweep failed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod plot;
pub mod table;
pub mod verify;

pub use config::{GridConfig, RunConfig};
pub use error::CliError;
pub use table::{csv_string, fmt_sig, read_csv, write_csv, CsvRow, HEADER};
