//! Scenario files, runs, convergence studies and artifacts for the
//! `kinklab` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checkpoint;
pub mod config;
pub mod converge;
pub mod error;
pub mod heatmap;
pub mod ripples;
pub mod runner;
pub mod scenario;
pub mod snapshot;
pub mod verify;

pub use config::{parse_config, parse_str, Scenario};
pub use error::LabError;
pub use runner::{run_scenario, RunOptions, RunReport, Status};
