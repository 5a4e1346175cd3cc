//! Config-file loading and deterministic trace/summary serialization for the
//! `potluck` command-line simulator.

pub mod config_file;
pub mod output;

pub use config_file::{load_config, to_toml_string, ConfigFileError};
