//! Batch front end for `wtdyn`: JSON experiment configs, presets for the two
//! worked examples, and one analysis per subcommand with CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod parse;
pub mod run;

pub use config::{load_config, Experiment, ExperimentConfig};
pub use error::{CliError, Result};
