//! Flat TOML sweep files.
//!
//! Keys are the long flag names (`nt`, `rho`, `r-grid`, `eta-grid-db`, ...).
//! Grid and list values may be written either as the flag string
//! (`rho = "0,0.5,0.9"`, `r-grid = "0.1:1.9:0.1"`), a number, or an array.
//!
//! ```toml
//! nt = 2
//! nr = 2
//! rho = [0.0, 0.5, 0.9]
//! r-grid = "0.5:1.5:0.5"
//! eta-grid-db = "0:20:5"
//! samples = 1000000
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::grid::{parse_list, parse_range};
use crate::CliError;

/// A number, an array of numbers, or the flag's string spelling.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Values {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl Values {
    /// Interpret as an explicit list (`a,b,c`).
    pub fn list(&self) -> Result<Vec<f64>, CliError> {
        match self {
            Values::Number(x) => Ok(vec![*x]),
            Values::List(v) if !v.is_empty() => Ok(v.clone()),
            Values::List(_) => Err(CliError::Input("empty list in config file".into())),
            Values::Text(s) => parse_list(s),
        }
    }

    /// Interpret as a range (`start:stop:step`, or `[start, stop, step]`).
    pub fn range(&self) -> Result<Vec<f64>, CliError> {
        match self {
            Values::Text(s) => parse_range(s),
            Values::List(v) if v.len() == 3 => crate::grid::inclusive_range(v[0], v[1], v[2]),
            _ => Err(CliError::Input("grid must be \"start:stop:step\" or [start, stop, step]".into())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub nt: Option<usize>,
    pub nr: Option<usize>,
    pub rho: Option<Values>,
    pub corr_file: Option<PathBuf>,
    pub r: Option<Values>,
    pub r_grid: Option<Values>,
    pub eta_db: Option<Values>,
    pub eta_grid_db: Option<Values>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub threads: Option<usize>,
    pub streams: Option<u64>,
    pub rel_step: Option<f64>,
    // subcommand switches
    pub with_mc: Option<bool>,
    pub estimate: Option<bool>,
    pub dmax: Option<bool>,
    pub asymptote: Option<bool>,
    pub relative_gain: Option<bool>,
    pub exact: Option<bool>,
    pub quantity: Option<String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("config file: {e}")))
    }

    /// Read a config file; relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.corr_file, &mut cfg.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_spellings() {
        let cfg = FileConfig::parse(
            "nt = 3\nrho = [0, 0.5]\nr-grid = \"0:1:0.5\"\neta-db = 10\nsamples = 1000\n",
        )
        .unwrap();
        assert_eq!(cfg.nt, Some(3));
        assert_eq!(cfg.rho.unwrap().list().unwrap(), vec![0.0, 0.5]);
        assert_eq!(cfg.r_grid.unwrap().range().unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(cfg.eta_db.unwrap().list().unwrap(), vec![10.0]);
        assert_eq!(cfg.samples, Some(1000));
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(FileConfig::parse("snr = 3"), Err(CliError::Input(_))));
    }
}
