//! Library side of the `fiberq` command-line tool: configuration schema,
//! bundled presets and the command implementations.

pub mod commands;
pub mod config;
pub mod io;
pub mod presets;

pub use config::{ConfigError, CrosstalkConfig, ExperimentConfig, GeometryConfig, RunConfig};
