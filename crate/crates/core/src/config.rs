//! Run configuration shared by the command-line front end and the examples.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::alpha::ConvergenceSchedule;
use crate::error::{Error, Result};
use crate::fock::{Truncation, DEFAULT_N_MAX};
use crate::husimi::SearchConfig;
use crate::pdist::Quadrature;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub gnuplot: Option<PathBuf>,
    pub grid: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_max: usize,
    pub strict_truncation: bool,
    pub tail_tol: f64,
    pub search: SearchConfig,
    pub schedule: ConvergenceSchedule,
    pub quadrature: Quadrature,
    /// Nothing in the pipeline draws random numbers; `false` is rejected.
    pub deterministic: bool,
    pub outputs: Outputs,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = Truncation::default();
        Self {
            n_max: DEFAULT_N_MAX,
            strict_truncation: t.strict,
            tail_tol: t.tail_tol,
            search: SearchConfig::default(),
            schedule: ConvergenceSchedule::default(),
            quadrature: Quadrature::default(),
            deterministic: true,
            outputs: Outputs::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 8 {
            return Err(Error::TruncationOrder(self.n_max));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidParameter("tail_tol must be positive".into()));
        }
        if !self.deterministic {
            return Err(Error::InvalidParameter("nondeterministic runs are not supported".into()));
        }
        self.search.validate()?;
        self.schedule.validate()?;
        self.quadrature.validate()
    }

    pub fn truncation(&self) -> Truncation {
        Truncation {
            n_max: self.n_max,
            strict: self.strict_truncation,
            tail_tol: self.tail_tol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_keeps_defaults() {
        let cfg = RunConfig::from_json(r#"{"n_max": 40, "search": {"grid_points": 61}}"#).unwrap();
        assert_eq!(cfg.n_max, 40);
        assert_eq!(cfg.search.grid_points, 61);
        assert_eq!(cfg.search.tol_deg, SearchConfig::default().tol_deg);
        assert_eq!(cfg.schedule, ConvergenceSchedule::default());
        assert_eq!(cfg.quadrature.l, 6.0);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(RunConfig::from_json(r#"{"n_max": 4}"#).is_err());
        assert!(RunConfig::from_json(r#"{"tail_tol": 0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"deterministic": false}"#).is_err());
        assert!(RunConfig::from_json(r#"{"quadrature": {"h": -1}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn round_trips() {
        let cfg = RunConfig::default();
        let back = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
    }
}
