//! On-disk formats: scenario files, generator parameter files, and the
//! experiment configuration. All JSON, serialized with a stable field
//! order so outputs are reproducible byte for byte.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use coex_core::scenario::{validate_scenario, GeneratorParams, Scenario};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug)]
pub enum FileError {
    Io { path: String, source: io::Error },
    Parse { path: String, message: String },
    Invalid { path: String, violations: Vec<String> },
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FileError::Io { path, source } => write!(f, "{path}: {source}"),
            FileError::Parse { path, message } => write!(f, "{path}: {message}"),
            FileError::Invalid { path, violations } => {
                write!(f, "{path}: scenario fails validation:")?;
                for v in violations {
                    write!(f, "\n  {v}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for FileError {}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FileError> {
    let bytes = fs::read(path).map_err(|source| FileError::Io {
        path: path_str(path),
        source,
    })?;
    serde_json::from_slice(&bytes).map_err(|e| FileError::Parse {
        path: path_str(path),
        message: e.to_string(),
    })
}

pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| FileError::Parse {
        path: path_str(path),
        message: e.to_string(),
    })?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|source| FileError::Io {
        path: path_str(path),
        source,
    })
}

/// Loads and validates a scenario file, rejecting structurally broken
/// ones before they reach the evaluator.
pub fn load_scenario(path: &Path) -> Result<Scenario, FileError> {
    let scenario: Scenario = read_json(path)?;
    let report = validate_scenario(&scenario);
    if !report.is_ok() {
        return Err(FileError::Invalid {
            path: path_str(path),
            violations: report
                .violations
                .iter()
                .map(|v| format!("{}: {}", v.path, v.message))
                .collect(),
        });
    }
    Ok(scenario)
}

pub fn save_scenario(path: &Path, scenario: &Scenario) -> Result<(), FileError> {
    write_json_pretty(path, scenario)
}

/// Loads generator parameters; an absent file means defaults.
pub fn load_generator_params(path: Option<&Path>) -> Result<GeneratorParams, FileError> {
    match path {
        Some(p) => read_json(p),
        None => Ok(GeneratorParams::default()),
    }
}
