//! Evaluation of the condition notation: conditioning on listing states,
//! state maxima, probability intersection, approximate equality, central
//! finite differences and horizon integrals, all under interval semantics.

pub mod diff;
pub mod expr;
pub mod interval;
pub mod ops;
pub mod response;

use crate::symbols::Symbol;

pub use diff::{central_difference, finite_difference, joint_finite_difference, Order, Step};
pub use expr::{
    evaluate_expression, integrate_horizon, CalcSettings, Derivative, Differentiand, Differentiator, Evaluator, Expr,
    Horizon, StateSelector,
};
pub use interval::{ExtendedValue, Truth};
pub use ops::{approx_equal, argmax_state, argmax_state_of, argmin_state, joint_prob, Intersection};
pub use response::{Context, PathKind, ResponseFunction, Shape, StateOverlay, TimePath};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalcError {
    #[error("divisor interval contains zero")]
    DivisionByZeroInterval,
    #[error("integrand is indeterminate at t = {time}")]
    IndeterminateIntegrand { time: f64 },
    #[error("time path for {symbol} does not cover [0, {horizon}]")]
    PathCoverage { symbol: Symbol, horizon: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
