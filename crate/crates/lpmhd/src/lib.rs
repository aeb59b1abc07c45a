//! File formats, configuration, diagnostics and verification suites around
//! [`lpmhd_core`], plus the `lpmhd` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod format;
pub mod report;
pub mod verify;

pub use config::{load_config, RunConfig};
pub use error::{Error, Result};
