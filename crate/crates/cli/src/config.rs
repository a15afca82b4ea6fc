//! Flat key-value experiment configuration, loadable from JSON with
//! command-line and environment overrides layered on top.

use serde::{Deserialize, Serialize};
use vervaat::{Error, Result};

/// Parameters shared by every experiment. Individual suites derive
/// their internal sizes from `grid` and `reps` where the criterion does
/// not pin them.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; every replica runs on its own derived stream.
    pub seed: u64,
    /// Grid steps per unit-time path; a power of two in [2^4, 2^16].
    pub grid: usize,
    /// Monte Carlo replicas for the large ensemble suites.
    pub reps: usize,
    /// Endpoint used by single-λ flows.
    pub lambda: f64,
    /// Per-test significance for the seeded statistical suites.
    pub alpha: f64,
    /// Directory for CSV/JSON artifacts; none writes no files.
    pub out_dir: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 7,
            grid: 1 << 12,
            reps: 100_000,
            lambda: -1.0,
            alpha: vervaat::stats::DEFAULT_ALPHA,
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("config {path}: {e}")))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("config {path}: {e}")))?;
        Ok(cfg)
    }

    /// VERVAAT_SEED wins over both the file and the flags.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var("VERVAAT_SEED") {
            self.seed = v
                .parse()
                .map_err(|_| Error::invalid(format!("VERVAAT_SEED = {v:?} is not a u64")))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.grid.is_power_of_two() || !(16..=65_536).contains(&self.grid) {
            return Err(Error::invalid(format!(
                "grid = {} must be a power of two in [2^4, 2^16]",
                self.grid
            )));
        }
        if self.reps == 0 {
            return Err(Error::invalid("reps must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha = {} outside (0, 1)", self.alpha)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_grid() {
        let mut cfg = ExperimentConfig::default();
        cfg.grid = 1000;
        assert!(cfg.validate().is_err());
        cfg.grid = 1 << 17;
        assert!(cfg.validate().is_err());
        cfg.grid = 1 << 4;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn json_round_trip() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.seed, cfg.seed);
        assert_eq!(back.grid, cfg.grid);
    }
}
