//! Quadrature settings from a `key = value` text file.
//!
//! ```text
//! # tolerances for sweeps
//! abs_tol = 1e-13
//! rel_tol = 1e-8
//! max_subdivisions = 2000
//! ```
//!
//! Resolution order: built-in default, then the file named by
//! `BOOSTCAP_CONFIG` (or an explicit path), then command-line flags.

use std::path::Path;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;

pub const CONFIG_ENV: &str = "BOOSTCAP_CONFIG";

/// Partial quadrature settings; unset fields keep the base value.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuadratureOverrides {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("line {line}: cannot parse {key} = {value:?}")))
}

impl QuadratureOverrides {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = QuadratureOverrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "abs_tol" => out.abs_tol = Some(parse_value(key, value, i + 1)?),
                "rel_tol" => out.rel_tol = Some(parse_value(key, value, i + 1)?),
                "max_subdivisions" => out.max_subdivisions = Some(parse_value(key, value, i + 1)?),
                _ => return Err(Error::Config(format!("line {}: unknown key {key:?}", i + 1))),
            }
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Settings from the file named by `BOOSTCAP_CONFIG`, or none when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) if !path.is_empty() => Self::from_file(Path::new(&path)),
            _ => Ok(Self::default()),
        }
    }

    /// `other` wins wherever it is set.
    pub fn merge(self, other: QuadratureOverrides) -> Self {
        QuadratureOverrides {
            abs_tol: other.abs_tol.or(self.abs_tol),
            rel_tol: other.rel_tol.or(self.rel_tol),
            max_subdivisions: other.max_subdivisions.or(self.max_subdivisions),
        }
    }

    pub fn apply(&self, base: QuadratureConfig) -> Result<QuadratureConfig> {
        QuadratureConfig::new(
            self.abs_tol.unwrap_or(base.abs_tol),
            self.rel_tol.unwrap_or(base.rel_tol),
            self.max_subdivisions.unwrap_or(base.max_subdivisions),
        )
        .map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let o = QuadratureOverrides::parse(
            "# comment\n\nrel_tol = 1e-9  # trailing\n  max_subdivisions=500\n",
        )
        .unwrap();
        assert_eq!(o.rel_tol, Some(1e-9));
        assert_eq!(o.max_subdivisions, Some(500));
        assert_eq!(o.abs_tol, None);
        let cfg = o.apply(QuadratureConfig::SWEEP).unwrap();
        assert_eq!(cfg.abs_tol, QuadratureConfig::SWEEP.abs_tol);
        assert_eq!(cfg.rel_tol, 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        for text in ["rel_tol 1e-9", "tol = 1", "rel_tol = fast", "max_subdivisions = -3"] {
            assert!(matches!(QuadratureOverrides::parse(text), Err(Error::Config(_))), "{text}");
        }
        let o = QuadratureOverrides::parse("rel_tol = -1").unwrap();
        assert!(o.apply(QuadratureConfig::SWEEP).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = QuadratureOverrides::parse("rel_tol = 1e-9\nabs_tol = 1e-14").unwrap();
        let flags = QuadratureOverrides { rel_tol: Some(1e-7), ..Default::default() };
        let m = file.merge(flags);
        assert_eq!(m.rel_tol, Some(1e-7));
        assert_eq!(m.abs_tol, Some(1e-14));
    }

    #[test]
    fn reads_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.conf");
        std::fs::write(&path, "abs_tol = 1e-12\n").unwrap();
        assert_eq!(QuadratureOverrides::from_file(&path).unwrap().abs_tol, Some(1e-12));
        assert!(QuadratureOverrides::from_file(&dir.path().join("missing")).is_err());
    }
}
