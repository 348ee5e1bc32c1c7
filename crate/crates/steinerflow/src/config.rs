//! Run configuration shared by the CLI commands.
//!
//! Values come from defaults, then a `key=value` file, then command-line
//! flags; flags win.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Config {
    /// Grid nodes across the domain extent for PDE solves.
    pub grid_resolution: usize,
    pub n_strips: usize,
    /// Number of schedule directions (angles k π / K).
    pub directions: usize,
    /// Flow time per direction.
    pub horizon: f64,
    pub shrink_duration: f64,
    pub cg_tol: f64,
    pub eig_tol: f64,
    /// Verification slack for computed diagram points.
    pub eps_disc: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            grid_resolution: 128,
            n_strips: 256,
            directions: 8,
            horizon: 6.0,
            shrink_duration: 1.0,
            cg_tol: 1e-10,
            eig_tol: 1e-8,
            eps_disc: 0.03,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 32 {
            return Err(Error::InvalidArgument(format!(
                "grid_resolution = {}, need at least 32",
                self.grid_resolution
            )));
        }
        if self.n_strips < 8 {
            return Err(Error::InvalidArgument(format!(
                "n_strips = {}, need at least 8",
                self.n_strips
            )));
        }
        if self.directions == 0 {
            return Err(Error::InvalidArgument("directions = 0".into()));
        }
        for (name, v) in [
            ("horizon", self.horizon),
            ("shrink_duration", self.shrink_duration),
            ("cg_tol", self.cg_tol),
            ("eig_tol", self.eig_tol),
            ("eps_disc", self.eps_disc),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// Applies `key=value` lines from a config file ('#' comments allowed).
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(k) => &raw[..k],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::Parse {
                line: lineno + 1,
                msg: "expected key=value".into(),
            })?;
            self.apply_kv(key.trim(), value.trim()).map_err(|e| Error::Parse {
                line: lineno + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: std::num::ParseFloatError| Error::InvalidArgument(e.to_string());
        let bad_int = |e: std::num::ParseIntError| Error::InvalidArgument(e.to_string());
        match key {
            "grid_resolution" => self.grid_resolution = value.parse().map_err(bad_int)?,
            "n_strips" => self.n_strips = value.parse().map_err(bad_int)?,
            "directions" => self.directions = value.parse().map_err(bad_int)?,
            "horizon" => self.horizon = value.parse().map_err(bad)?,
            "shrink_duration" => self.shrink_duration = value.parse().map_err(bad)?,
            "cg_tol" => self.cg_tol = value.parse().map_err(bad)?,
            "eig_tol" => self.eig_tol = value.parse().map_err(bad)?,
            "eps_disc" => self.eps_disc = value.parse().map_err(bad)?,
            _ => return Err(Error::InvalidArgument(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(Config::default().validate().is_ok());
    }

    #[test]
    fn file_override() {
        let dir = std::env::temp_dir().join("steinerflow-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# test\nn_strips = 64\nhorizon=2.5\n").unwrap();
        let mut cfg = Config::default();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.n_strips, 64);
        assert_eq!(cfg.horizon, 2.5);
        assert_eq!(cfg.grid_resolution, 128);
    }

    #[test]
    fn invalid_values_rejected() {
        let mut cfg = Config::default();
        cfg.n_strips = 4;
        assert!(cfg.validate().is_err());
        let mut cfg2 = Config::default();
        cfg2.grid_resolution = 16;
        assert!(cfg2.validate().is_err());
    }
}
