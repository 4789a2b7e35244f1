use serde::{Deserialize, Serialize};

use crate::conditions::{eval_condition, ConditionId, Status};
use crate::config::EvalConfig;
use crate::scenario::Scenario;
use crate::symbols::Symbol;

use super::SimError;

/// Flip search covers parameter changes up to this fraction of its value.
const FLIP_RANGE: f64 = 0.5;
const SCAN_STEPS: usize = 100;
const BISECTION_STEPS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub condition: ConditionId,
    pub parameter: Symbol,
    pub base_value: f64,
    pub status: Status,
    /// Signed slack at base, positive iff the condition holds.
    pub margin: f64,
    pub rel_step: f64,
    pub margin_minus: Option<f64>,
    pub margin_plus: Option<f64>,
    /// `(Δmargin / margin) / (Δparam / param)`; `None` when the parameter or
    /// margin is zero, or a perturbed margin is not a point value.
    pub elasticity: Option<f64>,
    /// Smallest signed parameter change (within ±50%) that flips the status.
    pub delta_to_flip: Option<f64>,
}

fn perturbed(s: &Scenario, id: ConditionId, param: Symbol, value: f64, cfg: &EvalConfig) -> (Status, Option<f64>) {
    let mut t = s.clone();
    t.set_consistent(param, value);
    let v = eval_condition(&t, id, cfg);
    (v.status, v.margin)
}

fn flips(base: Status, other: Status) -> bool {
    matches!((base, other), (Status::Satisfied, Status::Violated) | (Status::Violated, Status::Satisfied))
}

/// Margin, elasticity and flip distance of `id` with respect to `param`.
pub fn sensitivity(s: &Scenario, id: ConditionId, param: Symbol, rel_step: f64, cfg: &EvalConfig) -> Result<SensitivityResult, SimError> {
    if !(rel_step > 0.0 && rel_step < 1.0) {
        return Err(SimError::InvalidDistribution(format!("rel_step must lie in (0, 1), got {rel_step}")));
    }
    if param == Symbol::I {
        return Err(SimError::InvalidDistribution("I is derived from I_p + I_i; perturb a component".into()));
    }
    let base = eval_condition(s, id, cfg);
    match base.status {
        Status::VacuouslySatisfied | Status::Skipped => return Err(SimError::VacuousAtBase(id)),
        Status::Indeterminate => return Err(SimError::IndeterminateAtBase(id)),
        _ => {}
    }
    let margin = base.margin.ok_or(SimError::IndeterminateAtBase(id))?;
    let p0 = s.get(param);

    let (_, m_minus) = perturbed(s, id, param, p0 * (1.0 - rel_step), cfg);
    let (_, m_plus) = perturbed(s, id, param, p0 * (1.0 + rel_step), cfg);
    let elasticity = match (m_minus, m_plus) {
        (Some(a), Some(b)) if p0 != 0.0 && margin != 0.0 => Some(((b - a) / margin) / (2.0 * rel_step)),
        _ => None,
    };

    let range = FLIP_RANGE * if p0 != 0.0 { p0.abs() } else { 1.0 };
    let mut best: Option<f64> = None;
    for sign in [-1.0, 1.0] {
        let mut prev = 0.0;
        for k in 1..=SCAN_STEPS {
            let delta = sign * range * k as f64 / SCAN_STEPS as f64;
            let (st, _) = perturbed(s, id, param, p0 + delta, cfg);
            if flips(base.status, st) {
                let (mut inside, mut outside) = (prev, delta);
                for _ in 0..BISECTION_STEPS {
                    let mid = 0.5 * (inside + outside);
                    if flips(base.status, perturbed(s, id, param, p0 + mid, cfg).0) {
                        outside = mid;
                    } else {
                        inside = mid;
                    }
                }
                if best.is_none_or(|b: f64| outside.abs() < b.abs()) {
                    best = Some(outside);
                }
                break;
            }
            prev = delta;
        }
    }

    Ok(SensitivityResult {
        condition: id,
        parameter: param,
        base_value: p0,
        status: base.status,
        margin,
        rel_step,
        margin_minus: m_minus,
        margin_plus: m_plus,
        elasticity,
        delta_to_flip: best,
    })
}
