//! `key = value` run configuration. Command-line flags override the file.

use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for {key}: {value:?}")]
    BadValue { line: usize, key: String, value: String },
    #[error("{0} must be positive")]
    NotPositive(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub term_budget: u64,
    pub k_cap: u32,
    pub n_cap: u32,
    pub seed: u64,
    pub prime: Option<u64>,
    pub w_prime: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            term_budget: inducert_core::kernel::DEFAULT_TERM_BUDGET,
            k_cap: 40,
            n_cap: 1 << 20,
            seed: 0,
            prime: None,
            w_prime: None,
            threads: None,
            out: None,
            csv: None,
        }
    }
}

impl RunConfig {
    /// Reads `key = value` lines on top of the defaults. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let (key, value) = s.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || ConfigError::BadValue { line, key: key.into(), value: value.into() };
            match key {
                "term_budget" => cfg.term_budget = value.parse().map_err(|_| bad())?,
                "k_cap" => cfg.k_cap = value.parse().map_err(|_| bad())?,
                "n_cap" => cfg.n_cap = value.parse().map_err(|_| bad())?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad())?,
                "prime" => cfg.prime = Some(value.parse().map_err(|_| bad())?),
                "w_prime" => cfg.w_prime = Some(value.parse().map_err(|_| bad())?),
                "threads" => cfg.threads = Some(value.parse().map_err(|_| bad())?),
                "out" => cfg.out = Some(value.into()),
                "csv" => cfg.csv = Some(value.into()),
                _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        if self.term_budget == 0 {
            return Err(ConfigError::NotPositive("term_budget"));
        }
        if self.k_cap == 0 {
            return Err(ConfigError::NotPositive("k_cap"));
        }
        if self.n_cap < 2 {
            return Err(ConfigError::NotPositive("n_cap"));
        }
        if self.threads == Some(0) {
            return Err(ConfigError::NotPositive("threads"));
        }
        Ok(())
    }
}
