use serde::{Deserialize, Serialize};

use crate::calculus::ops::APPROX_EPSILON;
use crate::calculus::{approx_equal, Evaluator, ExtendedValue, Truth};
use crate::config::{Aggregation, EvalConfig, GuardMode};
use crate::scenario::Scenario;

use super::catalog::{definition, Clause, Comparison};
use super::id::{ConditionId, ConditionSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Satisfied,
    Violated,
    VacuouslySatisfied,
    Indeterminate,
    /// Guard failed under the `skip` guard mode; ignored by aggregation.
    Skipped,
}

impl Status {
    /// Satisfied or VacuouslySatisfied.
    pub fn holds(self) -> bool {
        matches!(self, Status::Satisfied | Status::VacuouslySatisfied)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Aggregate {
    Satisfied,
    NotSatisfied,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseTrace {
    pub text: String,
    pub lhs: ExtendedValue,
    pub rhs: ExtendedValue,
    pub outcome: Truth,
    /// Signed slack: positive when the clause holds, `None` unless both
    /// sides are point values.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardTrace {
    pub text: String,
    pub status: Truth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub id: ConditionId,
    pub status: Status,
    /// Sides of the deciding clause; absent for vacuous and skipped verdicts.
    pub lhs: Option<ExtendedValue>,
    pub rhs: Option<ExtendedValue>,
    /// Smallest clause margin; positive iff every clause holds.
    pub margin: Option<f64>,
    pub guard: Option<GuardTrace>,
    pub clauses: Vec<ClauseTrace>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub scenario_label: String,
    pub set: ConditionSet,
    pub verdicts: Vec<ConditionVerdict>,
    pub aggregate: Aggregate,
    pub config: EvalConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub buyer_disintermediates: Aggregate,
    pub broker_provides_web_info: Aggregate,
    pub seller_disintermediates: Aggregate,
    pub buyer: ConditionReport,
    pub broker_web: ConditionReport,
    pub seller: ConditionReport,
}

impl Decision {
    pub fn reports(&self) -> [&ConditionReport; 3] {
        [&self.buyer, &self.broker_web, &self.seller]
    }
}

fn point_diff(a: ExtendedValue, b: ExtendedValue) -> Option<f64> {
    Some(a.as_point()? - b.as_point()?)
}

fn judge(cmp: Comparison, lhs: ExtendedValue, rhs: ExtendedValue, cfg: &EvalConfig) -> (Truth, Option<f64>) {
    match cmp {
        Comparison::Gt => (lhs.gt(&rhs), point_diff(lhs, rhs)),
        Comparison::Lt => (lhs.lt(&rhs), point_diff(rhs, lhs)),
        Comparison::Approx => {
            if let (Some(a), Some(b)) = (lhs.as_point(), rhs.as_point()) {
                let slack = cfg.rel_tol * a.abs().max(b.abs()).max(APPROX_EPSILON) - (a - b).abs();
                return (approx_equal(a, b, cfg.rel_tol).into(), Some(slack));
            }
            let scale = lhs.abs().max(rhs.abs()).max(ExtendedValue::point(APPROX_EPSILON)) * ExtendedValue::point(cfg.rel_tol);
            ((scale - (lhs - rhs).abs()).nonnegative(), None)
        }
        Comparison::ApproxZero => {
            let slack = ExtendedValue::point(cfg.zero_tol) - lhs.abs();
            (slack.nonnegative(), slack.as_point())
        }
    }
}

fn eval_clause(ev: &mut Evaluator<'_>, c: &Clause, cfg: &EvalConfig) -> ClauseTrace {
    let mut side = |e| match ev.eval(e, None) {
        Ok(v) => (v, None),
        Err(err) => (ExtendedValue::indeterminate(), Some(err.to_string())),
    };
    let (lhs, e1) = side(&c.lhs);
    let (rhs, e2) = side(&c.rhs);
    let (mut outcome, margin) = judge(c.cmp, lhs, rhs, cfg);
    if e1.is_some() || e2.is_some() {
        outcome = Truth::Unknown;
    }
    ClauseTrace { text: c.text.clone(), lhs, rhs, outcome, margin }
}

/// Evaluate one condition as printed.
pub fn eval_condition(s: &Scenario, id: ConditionId, cfg: &EvalConfig) -> ConditionVerdict {
    let def = definition(id, cfg);
    let mut ev = Evaluator::new(s, cfg.calc());

    let guard = def.guard.as_ref().map(|g| {
        let t = eval_clause(&mut ev, g, cfg);
        GuardTrace { text: t.text, status: t.outcome }
    });
    let clauses: Vec<ClauseTrace> = def.clauses.iter().map(|c| eval_clause(&mut ev, c, cfg)).collect();
    let mut notes = def.notes;
    notes.extend(ev.take_notes());

    if let Some(g) = &guard {
        if g.status == Truth::False {
            let status = match cfg.guard_mode {
                GuardMode::Vacuous => Status::VacuouslySatisfied,
                GuardMode::Skip => Status::Skipped,
                GuardMode::Violated => Status::Violated,
            };
            if status == Status::Violated {
                notes.push("guard failed; counted as violated".into());
            }
            return ConditionVerdict { id, status, lhs: None, rhs: None, margin: None, guard, clauses, notes };
        }
    }

    let combined = clauses.iter().fold(Truth::True, |acc, c| acc.and(c.outcome));
    let guard_unknown = guard.as_ref().is_some_and(|g| g.status == Truth::Unknown);
    let status = match combined {
        Truth::False => Status::Violated,
        Truth::True if !guard_unknown => Status::Satisfied,
        _ => Status::Indeterminate,
    };
    if guard_unknown && combined != Truth::False {
        notes.push("guard undecidable".into());
    }

    let deciding = match combined {
        Truth::False => clauses.iter().find(|c| c.outcome == Truth::False),
        Truth::Unknown => clauses.iter().find(|c| c.outcome == Truth::Unknown),
        Truth::True => clauses
            .iter()
            .min_by(|a, b| a.margin.unwrap_or(f64::INFINITY).total_cmp(&b.margin.unwrap_or(f64::INFINITY))),
    }
    .or(clauses.first());
    let margin = clauses.iter().map(|c| c.margin).collect::<Option<Vec<f64>>>().map(|m| m.into_iter().fold(f64::INFINITY, f64::min));

    ConditionVerdict {
        id,
        status,
        lhs: deciding.map(|c| c.lhs),
        rhs: deciding.map(|c| c.rhs),
        margin,
        guard,
        clauses,
        notes,
    }
}

/// Combine verdicts under the configured aggregation mode. Skipped
/// verdicts do not count.
pub fn aggregate(verdicts: &[ConditionVerdict], cfg: &EvalConfig) -> Aggregate {
    aggregate_statuses(verdicts.iter().map(|v| v.status), cfg)
}

pub fn aggregate_statuses(statuses: impl IntoIterator<Item = Status>, cfg: &EvalConfig) -> Aggregate {
    let (mut holds, mut violated, mut unknown) = (0usize, 0usize, 0usize);
    for st in statuses {
        match st {
            Status::Satisfied | Status::VacuouslySatisfied => holds += 1,
            Status::Violated => violated += 1,
            Status::Indeterminate => unknown += 1,
            Status::Skipped => {}
        }
    }
    let total = holds + violated + unknown;
    match cfg.aggregation {
        Aggregation::Conjunction => {
            if violated > 0 {
                Aggregate::NotSatisfied
            } else if unknown > 0 {
                Aggregate::Indeterminate
            } else {
                Aggregate::Satisfied
            }
        }
        Aggregation::Quorum { q } => {
            if total == 0 {
                return Aggregate::Satisfied;
            }
            let blocked = cfg.violations_block && violated > 0;
            let frac = |n: usize| n as f64 / total as f64;
            if blocked || frac(holds + unknown) < q {
                Aggregate::NotSatisfied
            } else if frac(holds) >= q {
                Aggregate::Satisfied
            } else {
                Aggregate::Indeterminate
            }
        }
    }
}

/// Evaluate every condition of `set` in printed order.
pub fn eval_condition_set(s: &Scenario, set: ConditionSet, cfg: &EvalConfig) -> ConditionReport {
    let verdicts: Vec<ConditionVerdict> = set.ids().map(|id| eval_condition(s, id, cfg)).collect();
    let aggregate = aggregate(&verdicts, cfg);
    ConditionReport { scenario_label: s.label.clone(), set, verdicts, aggregate, config: *cfg }
}

pub fn decide(s: &Scenario, cfg: &EvalConfig) -> Decision {
    let buyer = eval_condition_set(s, ConditionSet::Buyer, cfg);
    let broker_web = eval_condition_set(s, ConditionSet::BrokerWeb, cfg);
    let seller = eval_condition_set(s, ConditionSet::Seller, cfg);
    Decision {
        buyer_disintermediates: buyer.aggregate,
        broker_provides_web_info: broker_web.aggregate,
        seller_disintermediates: seller.aggregate,
        buyer,
        broker_web,
        seller,
    }
}
