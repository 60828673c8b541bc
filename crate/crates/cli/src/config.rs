//! Run configuration: command-line flags layered over an optional TOML file.
//!
//! The file is located through the `APDENSITY_CONFIG` environment variable
//! and may set any of
//!
//! ```toml
//! cap = 28          # largest n enumerated by brute force (<= 32)
//! threads = 4       # worker threads (>= 1)
//! format = "csv"    # text | csv | json
//! ```
//!
//! Flags given on the command line always win.

use std::path::{Path, PathBuf};

use apdensity_core::{Error, DEFAULT_CAP, MAX_CAP};
use clap::ValueEnum;
use serde::Deserialize;

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "APDENSITY_CONFIG";

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

/// Why a configuration file could not be used.
#[derive(Debug)]
pub enum ConfigError {
    /// The file could not be read.
    Unreadable(String),
    /// The file was read but its contents are invalid.
    Invalid(Error),
}

/// Contents of the configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub cap: Option<usize>,
    pub threads: Option<usize>,
    pub format: Option<Format>,
}

impl FileConfig {
    /// Reads and parses a configuration file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Unreadable(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| {
            ConfigError::Invalid(Error::InvalidArgument(format!(
                "malformed config {}: {}",
                path.display(),
                e.message()
            )))
        })
    }

    /// The file named by [`CONFIG_ENV`], or defaults when it is unset.
    pub fn from_env() -> Result<Self, ConfigError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }
}

/// Effective settings for one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    /// Largest `n` enumerated by brute force.
    pub enumeration_cap: usize,
    /// Worker threads; `None` lets the pool pick one per core.
    pub thread_count: Option<usize>,
    /// Output file, or standard output.
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    /// Merges flags over the file and validates the result.
    pub fn resolve(
        file: FileConfig,
        cap: Option<usize>,
        threads: Option<usize>,
        format: Option<Format>,
        output: Option<PathBuf>,
    ) -> Result<Self, Error> {
        let enumeration_cap = cap.or(file.cap).unwrap_or(DEFAULT_CAP);
        if enumeration_cap > MAX_CAP {
            return Err(Error::InvalidArgument(format!(
                "cap {enumeration_cap} exceeds the maximum {MAX_CAP}"
            )));
        }
        let thread_count = threads.or(file.threads);
        if thread_count == Some(0) {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        Ok(RunConfig {
            enumeration_cap,
            thread_count,
            output,
            format: format.or(file.format).unwrap_or_default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = FileConfig {
            cap: Some(20),
            threads: Some(3),
            format: Some(Format::Csv),
        };
        let cfg = RunConfig::resolve(file, Some(28), None, None, None).unwrap();
        assert_eq!(cfg.enumeration_cap, 28);
        assert_eq!(cfg.thread_count, Some(3));
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn defaults_and_limits() {
        let cfg = RunConfig::resolve(FileConfig::default(), None, None, None, None).unwrap();
        assert_eq!(cfg.enumeration_cap, DEFAULT_CAP);
        assert_eq!(cfg.format, Format::Text);
        assert!(RunConfig::resolve(FileConfig::default(), Some(33), None, None, None).is_err());
        assert!(RunConfig::resolve(FileConfig::default(), None, Some(0), None, None).is_err());
    }

    #[test]
    fn parses_toml() {
        let f: FileConfig = toml::from_str("cap = 30\nformat = \"json\"\n").unwrap();
        assert_eq!(f.cap, Some(30));
        assert_eq!(f.format, Some(Format::Json));
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
