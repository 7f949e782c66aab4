//! Flat `key = value` run configuration.

use crate::domain::{make_grid, Grid, GridFunction1D, MembranePair, Params, Role};
use crate::error::{Error, Result};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Flat,
    /// `u = -a(1-x²)`, `v = -1 + a(1-x²)`, `0 ≤ a < 1/2`.
    Parabolic(f64),
    /// CSV with header `x,u,v` and one row per grid node.
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: Params,
    pub nx: usize,
    pub nz: usize,
    pub init: InitSpec,
    pub output_dir: PathBuf,
    pub sample_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: Params::default(),
            nx: 33,
            nz: 17,
            init: InitSpec::Flat,
            output_dir: PathBuf::from("out"),
            sample_every: 10,
        }
    }
}

fn bad(key: &str, reason: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {reason}"))
}

fn number(key: &str, raw: &str) -> Result<f64> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(key, format!("expected a number, got `{raw}`")))
}

fn count(key: &str, raw: &str) -> Result<usize> {
    raw.parse::<usize>()
        .map_err(|_| bad(key, format!("expected a non-negative integer, got `{raw}`")))
}

pub fn parse_init(raw: &str) -> Result<InitSpec> {
    if raw == "flat" {
        return Ok(InitSpec::Flat);
    }
    if let Some(a) = raw.strip_prefix("parabolic:") {
        let a = number("init", a)?;
        if !(0.0..0.5).contains(&a) {
            return Err(bad("init", format!("parabolic amplitude must lie in [0, 1/2), got {a}")));
        }
        return Ok(InitSpec::Parabolic(a));
    }
    if let Some(p) = raw.strip_prefix("file:") {
        return Ok(InitSpec::File(PathBuf::from(p)));
    }
    Err(bad("init", format!("expected flat, parabolic:a or file:path, got `{raw}`")))
}

impl RunConfig {
    /// Applies one `key = value` pair.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let p = &mut self.params;
        match key {
            "eps" => p.eps = number(key, raw)?,
            "lambda" => p.lambda = number(key, raw)?,
            "mu" => p.mu = number(key, raw)?,
            "kappa" => p.kappa = number(key, raw)?,
            "q" => p.q = number(key, raw)?,
            "dt" => p.dt = Some(number(key, raw)?),
            "t_end" => p.t_end = number(key, raw)?,
            "gap_tol" => p.gap_tol = number(key, raw)?,
            "nx" => self.nx = count(key, raw)?,
            "nz" => self.nz = count(key, raw)?,
            "sample_every" => self.sample_every = count(key, raw)?,
            "init" => self.init = parse_init(raw)?,
            "output_dir" => self.output_dir = PathBuf::from(raw),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut c = Self::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key = value", no + 1)));
            };
            c.set(k.trim(), v.trim())?;
        }
        Ok(c)
    }

    /// Range checks on every key.
    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        let checks: [(&str, bool, String); 9] = [
            ("eps", p.eps > 0.0 && p.eps <= 1.0, "must lie in (0, 1]".into()),
            ("lambda", p.lambda >= 0.0, "must be ≥ 0".into()),
            ("mu", p.mu >= 0.0, "must be ≥ 0".into()),
            ("kappa", p.kappa > 0.0 && p.kappa < 0.5, "must lie in (0, 1/2)".into()),
            ("q", p.q >= 2.0, "must be ≥ 2".into()),
            ("dt", p.dt.is_none_or(|d| d > 0.0), "must be > 0".into()),
            ("t_end", p.t_end >= 0.0, "must be ≥ 0".into()),
            ("gap_tol", p.gap_tol > 0.0 && p.gap_tol < 1.0, "must lie in (0, 1)".into()),
            ("sample_every", self.sample_every >= 1, "must be ≥ 1".into()),
        ];
        for (key, ok, reason) in checks {
            if !ok {
                return Err(bad(key, reason));
            }
        }
        for (key, n) in [("nx", self.nx), ("nz", self.nz)] {
            if n < 9 || n % 2 == 0 {
                return Err(bad(key, format!("must be odd and ≥ 9, got {n}")));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        make_grid(self.nx, self.nz)
    }

    pub fn initial_state(&self) -> Result<MembranePair> {
        let g = self.grid()?;
        match &self.init {
            InitSpec::Flat => Ok(MembranePair::flat(g)),
            InitSpec::Parabolic(a) => Ok(MembranePair::parabolic(g, *a)),
            InitSpec::File(path) => read_state(path, g),
        }
    }
}

/// Reads a configuration file; a missing file is reported with its path.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let c = RunConfig::parse_str(&text)?;
    c.validate()?;
    Ok(c)
}

fn read_state(path: &Path, g: Grid) -> Result<MembranePair> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("init: cannot read {}: {e}", path.display())))?;
    let mut u = Vec::new();
    let mut v = Vec::new();
    for (no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(bad("init", format!("{}: line {} needs x,u,v", path.display(), no + 1)));
        }
        u.push(number("init", cols[1])?);
        v.push(number("init", cols[2])?);
    }
    if u.len() != g.nx() {
        return Err(bad("init", format!("{} has {} rows, nx is {}", path.display(), u.len(), g.nx())));
    }
    MembranePair::new(
        GridFunction1D::new(g, u, Role::Displacement)?,
        GridFunction1D::new(g, v, Role::Displacement)?,
    )
    .map_err(|e| bad("init", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        let c = RunConfig::parse_str("").unwrap();
        c.validate().unwrap();
        assert_eq!(c.params, Params::default());
        assert_eq!(c.init, InitSpec::Flat);
    }

    #[test]
    fn parses_keys_and_comments() {
        let c = RunConfig::parse_str("eps = 0.3 # aspect\n\nlambda=2\ninit = parabolic:0.25\nnx = 65\n").unwrap();
        assert_eq!(c.params.eps, 0.3);
        assert_eq!(c.params.lambda, 2.0);
        assert_eq!(c.init, InitSpec::Parabolic(0.25));
        assert_eq!(c.nx, 65);
    }

    #[test]
    fn unknown_key_named() {
        let e = RunConfig::parse_str("voltage = 3").unwrap_err().to_string();
        assert!(e.contains("voltage"), "{e}");
    }

    #[test]
    fn range_violations_named() {
        let e = RunConfig::parse_str("init = parabolic:0.6").unwrap_err().to_string();
        assert!(e.contains("init"), "{e}");
        let c = RunConfig::parse_str("nx = 10").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("nx"));
        let c = RunConfig::parse_str("eps = 2").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("eps"));
    }

    #[test]
    fn missing_file_names_path() {
        let e = parse_config(Path::new("/nonexistent/run.cfg")).unwrap_err().to_string();
        assert!(e.contains("/nonexistent/run.cfg"));
    }
}
