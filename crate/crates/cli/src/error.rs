use std::fmt;
use std::path::Path;

use axion_hall_core::Error as CoreError;
use serde_json::json;

/// Failure of a run, classified by exit code: 2 configuration, 3 numerics,
/// 4 filesystem.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config { field: Option<String>, message: String },
    Numeric { parameter: Option<String>, message: String },
    Io { path: String, message: String },
}

impl CliError {
    pub fn config(field: Option<&str>, message: impl Into<String>) -> Self {
        CliError::Config { field: field.map(str::to_owned), message: message.into() }
    }

    pub fn numeric(parameter: Option<String>, message: impl Into<String>) -> Self {
        CliError::Numeric { parameter, message: message.into() }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError::Io { path: path.display().to_string(), message: err.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }

    /// Machine-readable report written to stderr.
    pub fn report(&self) -> serde_json::Value {
        let body = match self {
            CliError::Config { field, message } => {
                json!({ "kind": "config", "exit_code": 2, "field": field, "message": message })
            }
            CliError::Numeric { parameter, message } => {
                json!({ "kind": "numeric", "exit_code": 3, "parameter": parameter, "message": message })
            }
            CliError::Io { path, message } => json!({ "kind": "io", "exit_code": 4, "path": path, "message": message }),
        };
        json!({ "error": body })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field: Some(k), message } => write!(f, "configuration error in {k}: {message}"),
            CliError::Config { field: None, message } => write!(f, "configuration error: {message}"),
            CliError::Numeric { parameter: Some(p), message } => write!(f, "numerical failure ({p}): {message}"),
            CliError::Numeric { parameter: None, message } => write!(f, "numerical failure: {message}"),
            CliError::Io { path, message } => write!(f, "i/o error on {path}: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let message = e.to_string();
        match e {
            CoreError::StepUnderflow { k, .. } | CoreError::StepBudget { k, .. } => {
                CliError::numeric(Some(format!("k = {k}")), message)
            }
            CoreError::NoInstability { .. } => CliError::numeric(Some("mu5_eff".into()), message),
            CoreError::Invalid { field, .. } => CliError::config(Some(field), message),
            CoreError::Domain { t, .. } => CliError::Config { field: Some(format!("t = {t}")), message },
            CoreError::NonPositiveWavenumber(_) => CliError::config(Some("k"), message),
            CoreError::Binning { .. } => CliError::config(Some("bin_edges"), message),
            CoreError::Lattice(_) => CliError::config(Some("lattice.gram"), message),
            CoreError::NotVisible(_) | CoreError::DimensionMismatch { .. } => CliError::config(Some("lattice.q"), message),
            CoreError::ResourceGuard { .. } => CliError::config(Some("enumerate"), message),
            CoreError::GridSetup(_) => CliError::config(Some("anomaly"), message),
        }
    }
}
