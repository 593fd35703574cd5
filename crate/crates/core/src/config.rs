//! Harness configuration: a `key = value` file with dotted keys, e.g.
//!
//! ```text
//! partition.eps = 0.1
//! truncation.max_norm = 40000
//! oracle.rel_tol = 1e-10
//! ```
//!
//! Missing keys keep their defaults; unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::OracleConfig;
use crate::kernel::PartitionConstants;
use crate::zagier::TruncationConfig;

/// Environment variable read by [`crate::par::init_threads_from_env`].
pub const THREADS_ENV: &str = "SYMSQ_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub partition: PartitionConstants,
    pub truncation: TruncationConfig,
    pub oracle: OracleConfig,
}

impl HarnessConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: HarnessConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn load_opt(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn validate(&self) -> Result<()> {
        self.partition.validate()?;
        TruncationConfig::new(self.truncation.max_norm, self.truncation.tail_tol)?;
        if !(self.oracle.rel_tol > 0.0) || self.oracle.max_steps == 0 {
            return Err(Error::Domain(format!("invalid oracle settings {:?}", self.oracle)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(HarnessConfig::parse("").unwrap(), HarnessConfig::default());
    }

    #[test]
    fn dotted_keys_override() {
        let cfg = HarnessConfig::parse("partition.eps1 = 0.02\ntruncation.max_norm = 40000\n# comment\noracle.rel_tol = 1e-10\n").unwrap();
        assert_eq!(cfg.partition.eps1, 0.02);
        assert_eq!(cfg.partition.eps, 0.1);
        assert_eq!(cfg.truncation.max_norm, 40000);
        assert_eq!(cfg.truncation.tail_tol, TruncationConfig::default().tail_tol);
        assert_eq!(cfg.oracle.rel_tol, 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(HarnessConfig::parse("partition.epsilon = 0.1").is_err());
        assert!(HarnessConfig::parse("partition.eps1 = 2.0").is_err());
        assert!(HarnessConfig::parse("truncation.max_norm = 2").is_err());
        assert!(HarnessConfig::parse("oracle.rel_tol = -1.0").is_err());
        assert!(HarnessConfig::parse("threads = 4").is_err());
        assert!(HarnessConfig::parse("partition.eps = ").is_err());
    }
}
