//! Broker objective over decision vectors.
//!
//! Capital is additive across decision fields: for each field `f` with a
//! declared response, `X(d) = X(base) + r_f(d_f) - r_f(base_f)`. Responses of
//! `SC_br` or `RC_br` to a field take precedence over a response of the sum
//! `RC_br + SC_br` to the same field.

use serde::{Deserialize, Serialize};

use crate::calculus::response::{Context, ResponseFunction};
use crate::config::{ObjectiveMode, OptimizerConfig};
use crate::scenario::Scenario;
use crate::symbols::{Composite, Quantity, State, Symbol};

use super::OptError;

/// Controllable cost fields, in vector order.
pub const FIELDS: [Symbol; 4] = [Symbol::Bb, Symbol::Bs, Symbol::Bi, Symbol::Bn];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionVector {
    #[serde(rename = "B_b")]
    pub b_b: f64,
    #[serde(rename = "B_s")]
    pub b_s: f64,
    #[serde(rename = "B_i")]
    pub b_i: f64,
    #[serde(rename = "B_n")]
    pub b_n: f64,
    pub state: State,
}

impl DecisionVector {
    pub fn from_array(x: [f64; 4], state: State) -> Self {
        DecisionVector { b_b: x[0], b_s: x[1], b_i: x[2], b_n: x[3], state }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.b_b, self.b_s, self.b_i, self.b_n]
    }

    /// `B_b + B_s + B_i + B_n`
    pub fn cost(&self) -> f64 {
        self.b_b + self.b_s + self.b_i + self.b_n
    }

    /// The part of the cost the commission must cover: `B_b + B_s + B_i`.
    pub fn covered_cost(&self) -> f64 {
        self.b_b + self.b_s + self.b_i
    }
}

/// The scenario as seen from one listing state, with the responses the
/// objective needs looked up once.
#[derive(Debug, Clone)]
pub struct Instance<'a> {
    pub state: State,
    pub base: [f64; 4],
    pub commission: f64,
    capital0: f64,
    capital: Vec<(usize, &'a ResponseFunction)>,
    rho: Vec<(f64, Vec<(usize, &'a ResponseFunction)>)>,
}

fn lookup<'a>(s: &'a Scenario, driven: Quantity, state: State) -> Vec<(usize, &'a ResponseFunction)> {
    FIELDS
        .iter()
        .enumerate()
        .filter_map(|(j, &f)| s.response(driven, f.into(), Context::State(state)).map(|r| (j, r)))
        .collect()
}

impl<'a> Instance<'a> {
    pub fn new(s: &'a Scenario, state: State) -> Result<Self, OptError> {
        let st = Some(state);
        let sc = lookup(s, Symbol::ScBr.into(), state);
        let rc = lookup(s, Symbol::RcBr.into(), state);
        let sum = lookup(s, Composite::BrokerCapital.into(), state);
        let mut capital: Vec<_> = sc.iter().chain(rc.iter()).copied().collect();
        for (j, r) in sum {
            if !capital.iter().any(|(k, _)| *k == j) {
                capital.push((j, r));
            }
        }
        capital.sort_by_key(|(j, _)| *j);
        if capital.is_empty() {
            return Err(OptError::MissingCapitalResponse);
        }
        let rho = [Symbol::RhoP, Symbol::RhoI]
            .into_iter()
            .map(|p| (s.value(p, st), lookup(s, p.into(), state)))
            .filter(|(_, rs)| !rs.is_empty())
            .collect();
        Ok(Instance {
            state,
            base: FIELDS.map(|f| s.value(f, st)),
            commission: s.value(Symbol::C, st) * s.value(Symbol::P, st),
            capital0: s.value(Symbol::ScBr, st) + s.value(Symbol::RcBr, st),
            capital,
            rho,
        })
    }

    fn shifted(&self, y0: f64, terms: &[(usize, &ResponseFunction)], x: &[f64; 4]) -> f64 {
        terms.iter().fold(y0, |acc, (j, r)| acc + (r.eval(x[*j]) - r.eval(self.base[*j])))
    }

    /// `SC_br + RC_br` at `x`.
    pub fn capital(&self, x: &[f64; 4]) -> f64 {
        self.shifted(self.capital0, &self.capital, x)
    }

    /// Amount by which `x` misses the constraints; zero iff feasible.
    ///
    /// The strict `cP > max(0, B_b + B_s + B_i)` is checked as
    /// `cP >= max(0, B_b + B_s + B_i) + 1e-9 max(1, cP)`; closing
    /// probabilities with declared responses to the decision must stay > 0.
    pub fn violation(&self, x: &[f64; 4]) -> f64 {
        let covered = x[0] + x[1] + x[2];
        let slack = 1e-9 * self.commission.abs().max(1.0);
        let mut v = (covered.max(0.0) + slack - self.commission).max(0.0);
        for (p0, terms) in &self.rho {
            let p = self.shifted(*p0, terms, x);
            if !(p > 0.0) {
                v += 1e-12 - p;
            }
        }
        v
    }

    pub fn objective(&self, x: &[f64; 4], mode: ObjectiveMode, weights: (f64, f64)) -> f64 {
        let cost = x[0] + x[1] + x[2] + x[3];
        let capital = self.capital(x);
        match mode {
            ObjectiveMode::Combined => capital - cost,
            ObjectiveMode::WeightedSum => weights.0 * capital - weights.1 * cost,
        }
    }
}

/// Objective of `d` under `d.state`'s overlay.
pub fn broker_objective(s: &Scenario, d: &DecisionVector, cfg: &OptimizerConfig) -> Result<f64, OptError> {
    let inst = Instance::new(s, d.state)?;
    Ok(inst.objective(&d.to_array(), cfg.mode, cfg.weights))
}
