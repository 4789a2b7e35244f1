//! Run configuration: tolerances, modes and optimizer parameters. Every
//! field has a default, so `{}` is a complete configuration file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calculus::{CalcSettings, Horizon, Intersection};

/// How a condition set's verdicts combine into one decision.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Aggregation {
    #[default]
    Conjunction,
    /// Satisfied when at least a fraction `q` of the verdicts are
    /// Satisfied or VacuouslySatisfied.
    Quorum { q: f64 },
}

/// What a failed guard does to its condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuardMode {
    #[default]
    Vacuous,
    Skip,
    Violated,
}

/// Reading of B1's `| (U_iw > U_ip)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum B1Mode {
    #[default]
    Guard,
    /// The parenthesised comparison becomes one more conjunct.
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub rel_tol: f64,
    pub zero_tol: f64,
    pub fd_step_scale: f64,
    pub aggregation: Aggregation,
    /// Under quorum aggregation, any Violated verdict blocks Satisfied.
    pub violations_block: bool,
    pub intersection: Intersection,
    pub guard_mode: GuardMode,
    pub b1_mode: B1Mode,
    #[serde(rename = "seller_uses_U_sa")]
    pub seller_uses_u_sa: bool,
    pub horizon: Horizon,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            rel_tol: 0.05,
            zero_tol: 0.01,
            fd_step_scale: 1e-3,
            aggregation: Aggregation::Conjunction,
            violations_block: false,
            intersection: Intersection::Product,
            guard_mode: GuardMode::Vacuous,
            b1_mode: B1Mode::Guard,
            seller_uses_u_sa: false,
            horizon: Horizon::default(),
        }
    }
}

impl EvalConfig {
    pub fn calc(&self) -> CalcSettings {
        CalcSettings { step_scale: self.fd_step_scale, intersection: self.intersection, horizon: self.horizon }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    /// capital minus cost
    #[default]
    Combined,
    /// `w_capital * capital - w_cost * cost`
    WeightedSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub seed: u64,
    pub mode: ObjectiveMode,
    /// `(w_capital, w_cost)`
    pub weights: (f64, f64),
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 8, seed: 0, mode: ObjectiveMode::Combined, weights: (1.0, 1.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub evaluation: EvalConfig,
    pub optimizer: OptimizerConfig,
    pub format: Format,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let e = &self.evaluation;
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(e.rel_tol > 0.0) {
            return bad(format!("rel_tol must be > 0, got {}", e.rel_tol));
        }
        if !(e.zero_tol >= 0.0) {
            return bad(format!("zero_tol must be >= 0, got {}", e.zero_tol));
        }
        if !(e.fd_step_scale > 0.0) {
            return bad(format!("fd_step_scale must be > 0, got {}", e.fd_step_scale));
        }
        if let Aggregation::Quorum { q } = e.aggregation {
            if !(q > 0.0 && q <= 1.0) {
                return bad(format!("quorum q must lie in (0, 1], got {q}"));
            }
        }
        if !(e.horizon.t > 0.0 && e.horizon.dt > 0.0 && e.horizon.dt <= e.horizon.t) {
            return bad(format!("horizon needs T > 0 and 0 < dt <= T, got T = {}, dt = {}", e.horizon.t, e.horizon.dt));
        }
        let (wc, wk) = self.optimizer.weights;
        if !(wc.is_finite() && wk.is_finite() && wc >= 0.0 && wk >= 0.0) {
            return bad(format!("weights must be finite and non-negative, got ({wc}, {wk})"));
        }
        Ok(())
    }
}
