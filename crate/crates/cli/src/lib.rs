//! Command-line front end for modal pedestrian reachability: CSV ingestion,
//! configuration, synthetic corpora, prediction and evaluation outputs.

pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod evaluate;
pub mod io;
pub mod predict;
pub mod svg;
pub mod synthetic;

pub use error::{CliError, Result};
