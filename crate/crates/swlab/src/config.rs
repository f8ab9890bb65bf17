//! Run configuration.
//!
//! A config file is a flat TOML document; every key is optional and unknown
//! keys are rejected:
//!
//! ```toml
//! suites = ["reduce", "quillen"]   # default: all six
//! grid = 32                        # field grid size
//! seeds = [1, 2, 3]
//! tol = 1e-12                      # tolerance of roundoff-level identities
//! out = "ledger.jsonl"
//! snapshot = "snapshots"           # directory for SWRD field snapshots
//! h_mode = "unit"                  # or "general"
//! ```
//!
//! Command-line flags override file values.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Reduce,
    Patch,
    Liouville,
    Index,
    Symplectic,
    Quillen,
}

impl Suite {
    /// Dependency order.
    pub const ALL: [Suite; 6] = [
        Suite::Reduce,
        Suite::Patch,
        Suite::Liouville,
        Suite::Index,
        Suite::Symplectic,
        Suite::Quillen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Reduce => "reduce",
            Suite::Patch => "patch",
            Suite::Liouville => "liouville",
            Suite::Index => "index",
            Suite::Symplectic => "symplectic",
            Suite::Quillen => "quillen",
        }
    }

    /// Kinds of typed reports the suite emits.
    pub fn report_kinds(self) -> &'static [&'static str] {
        match self {
            Suite::Reduce | Suite::Patch => &[],
            Suite::Liouville => &["trace"],
            Suite::Index => &["index"],
            Suite::Symplectic => &["symplectic"],
            Suite::Quillen => &["quillen"],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HMode {
    #[default]
    Unit,
    General,
}

impl FromStr for HMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "unit" => Ok(HMode::Unit),
            "general" => Ok(HMode::General),
            _ => Err(format!("unknown H mode {s:?} (expected unit or general)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub suites: BTreeSet<Suite>,
    pub grid: usize,
    pub seeds: Vec<u64>,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
    pub h_mode: HMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: Suite::ALL.into_iter().collect(),
            grid: 32,
            seeds: vec![1, 2, 3],
            tol: 1e-12,
            out: None,
            snapshot: None,
            h_mode: HMode::Unit,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("config file: {0}")]
    Parse(String),
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("no suite selected")]
    NoSuite,
    #[error("no seed given")]
    NoSeed,
    #[error("grid size {0} is too small (minimum 8)")]
    Grid(usize),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    suites: Option<Vec<Suite>>,
    grid: Option<usize>,
    seeds: Option<Vec<u64>>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    snapshot: Option<PathBuf>,
    h_mode: Option<HMode>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let f: FileConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))?;
        let d = RunConfig::default();
        let cfg = RunConfig {
            suites: f.suites.map(|s| s.into_iter().collect()).unwrap_or(d.suites),
            grid: f.grid.unwrap_or(d.grid),
            seeds: f.seeds.unwrap_or(d.seeds),
            tol: f.tol.unwrap_or(d.tol),
            out: f.out,
            snapshot: f.snapshot,
            h_mode: f.h_mode.unwrap_or(d.h_mode),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(ConfigError::Tolerance(self.tol));
        }
        if self.suites.is_empty() {
            return Err(ConfigError::NoSuite);
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::NoSeed);
        }
        if self.grid < 8 {
            return Err(ConfigError::Grid(self.grid));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_defaults() {
        let c = RunConfig::from_toml("suites = [\"reduce\"]\ngrid = 16\nh_mode = \"general\"\n").unwrap();
        assert_eq!(c.suites.len(), 1);
        assert_eq!(c.grid, 16);
        assert_eq!(c.h_mode, HMode::General);
        assert_eq!(c.seeds, vec![1, 2, 3]);
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            RunConfig::from_toml("gird = 16"),
            Err(ConfigError::Parse(_))
        ));
        assert_eq!(
            RunConfig::from_toml("tol = -1.0"),
            Err(ConfigError::Tolerance(-1.0))
        );
        assert_eq!(RunConfig::from_toml("suites = []"), Err(ConfigError::NoSuite));
        assert!(RunConfig::from_toml("suites = [\"bogus\"]").is_err());
        assert!(RunConfig::from_toml("grid = 4").is_err());
    }
}
