//! The broker's problem: trade controllable costs against social plus
//! reputation capital under the commission-coverage constraint.

pub mod objective;
pub mod pareto;
mod search;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calculus::ops::argmin_state;
use crate::config::ObjectiveMode;
use crate::scenario::Scenario;
use crate::symbols::State;

pub use objective::{broker_objective, DecisionVector, Instance, FIELDS};
pub use pareto::{max_capital_within, pareto_sweep, ParetoPoint};
pub use search::optimize_broker;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OptError {
    #[error("SC_br and RC_br have no declared response to any of B_b, B_s, B_i, B_n")]
    MissingCapitalResponse,
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
}

/// Box constraints as read from a bounds file. Fields left out stay fixed
/// at the scenario's value; `states` defaults to the minimising state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    #[serde(rename = "B_b", default, skip_serializing_if = "Option::is_none")]
    pub b_b: Option<(f64, f64)>,
    #[serde(rename = "B_s", default, skip_serializing_if = "Option::is_none")]
    pub b_s: Option<(f64, f64)>,
    #[serde(rename = "B_i", default, skip_serializing_if = "Option::is_none")]
    pub b_i: Option<(f64, f64)>,
    #[serde(rename = "B_n", default, skip_serializing_if = "Option::is_none")]
    pub b_n: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<State>>,
}

#[derive(Debug, thiserror::Error)]
pub enum BoundsFileError {
    #[error("cannot read bounds {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bounds parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Bounds {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, BoundsFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| BoundsFileError::Io { path: path.display().to_string(), source })?;
        Ok(serde_json::from_str(&text)?)
    }

    fn get(&self, j: usize) -> Option<(f64, f64)> {
        [self.b_b, self.b_s, self.b_i, self.b_n][j]
    }

    pub fn with(mut self, j: usize, lo: f64, hi: f64) -> Self {
        let slot = match j {
            0 => &mut self.b_b,
            1 => &mut self.b_s,
            2 => &mut self.b_i,
            _ => &mut self.b_n,
        };
        *slot = Some((lo, hi));
        self
    }

    /// Resolve against a scenario: fixed fields take their base value under
    /// each candidate state.
    pub(crate) fn resolve(&self, s: &Scenario) -> Result<Resolved, OptError> {
        let states = match &self.states {
            Some(v) if v.is_empty() => return Err(OptError::InvalidBounds("`states` is empty".into())),
            Some(v) => {
                let mut v = v.clone();
                v.sort();
                v.dedup();
                v
            }
            None => vec![argmin_state(&s.states)],
        };
        let mut lo = [0.0; 4];
        let mut hi = [0.0; 4];
        let mut free = Vec::new();
        for j in 0..4 {
            match self.get(j) {
                Some((a, b)) => {
                    if !(a.is_finite() && b.is_finite() && a <= b) {
                        return Err(OptError::InvalidBounds(format!("{} bounds [{a}, {b}]", FIELDS[j])));
                    }
                    lo[j] = a;
                    hi[j] = b;
                    if a < b {
                        free.push(j);
                    }
                }
                None => {
                    lo[j] = f64::NAN;
                    hi[j] = f64::NAN;
                }
            }
        }
        Ok(Resolved { lo, hi, free, states })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Resolved {
    lo: [f64; 4],
    hi: [f64; 4],
    free: Vec<usize>,
    states: Vec<State>,
}

impl Resolved {
    /// Box for one instance; unbounded (fixed) fields collapse to the base value.
    pub(crate) fn for_instance(&self, inst: &Instance) -> ([f64; 4], [f64; 4]) {
        let mut lo = self.lo;
        let mut hi = self.hi;
        for j in 0..4 {
            if lo[j].is_nan() {
                lo[j] = inst.base[j];
                hi[j] = inst.base[j];
            }
        }
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    /// Best point found; when infeasible, the point closest to feasibility.
    pub decision: DecisionVector,
    pub objective: f64,
    pub capital: f64,
    pub cost: f64,
    pub feasible: bool,
    pub iterations: usize,
    pub mode: ObjectiveMode,
    pub restarts: usize,
    pub seed: u64,
}

impl OptResult {
    /// `cP > max(0, B_b + B_s + B_i)` at the returned point.
    pub fn satisfies_coverage(&self, s: &Scenario) -> bool {
        let st = Some(self.decision.state);
        let cp = s.value(crate::symbols::Symbol::C, st) * s.value(crate::symbols::Symbol::P, st);
        cp > self.decision.covered_cost().max(0.0)
    }
}
