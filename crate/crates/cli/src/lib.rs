//! Library surface of the experiment harness, exposed so integration
//! tests can drive configs and runs in-process.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, Command, ConfigError, ExperimentConfig};
pub use run::{run, RunArtifacts, RunError};
