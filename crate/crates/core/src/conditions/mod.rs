//! The buyer, broker-web and seller condition sets: definitions, traced
//! three-valued evaluation and aggregate decisions.

pub mod catalog;
pub mod engine;
pub mod id;

pub use catalog::{definition, Clause, Comparison, ConditionDef};
pub use engine::{
    aggregate, aggregate_statuses, decide, eval_condition, eval_condition_set, Aggregate, ClauseTrace, ConditionReport,
    ConditionVerdict, Decision, GuardTrace, Status,
};
pub use id::{ConditionId, ConditionSet};
