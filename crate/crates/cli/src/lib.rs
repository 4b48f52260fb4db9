//! Configuration loading, result export and the `cw-seed` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod validate;

pub use cli::cli_main;
pub use config::{load_config, load_scenario, write_config, LoadedConfig, ScenarioConfig};
pub use error::CliError;
