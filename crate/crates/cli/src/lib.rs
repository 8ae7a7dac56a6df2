//! Configuration-driven front end for `axion-hall-core`.
//!
//! A run reads one TOML file, validates every field, executes one scenario
//! and writes CSV/JSON artifacts plus a `manifest.json` from which the run
//! can be repeated byte for byte.

pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod scenario;

pub use config::{RunConfig, Scenario};
pub use error::CliError;
pub use manifest::{read_manifest, rerun, run_to_dir, RunManifest, MANIFEST_NAME};
pub use scenario::{execute, Outcome};

/// Environment variable overriding the default worker count.
pub const THREADS_ENV: &str = "AXION_HALL_THREADS";
