//! Central finite differences over declared response functions.

use serde::{Deserialize, Serialize};

use super::interval::ExtendedValue;
use super::ops::{joint_prob, Intersection};
use super::response::Context;
use crate::scenario::Scenario;
use crate::symbols::{Quantity, Symbol};

/// Default relative step scale: `h = 1e-3 * max(1, |x0|)`.
pub const DEFAULT_STEP_SCALE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Order {
    First = 1,
    Second = 2,
    Third = 3,
}

impl TryFrom<u8> for Order {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            3 => Ok(Order::Third),
            _ => Err(format!("derivative order must be 1, 2 or 3, got {v}")),
        }
    }
}

impl From<Order> for u8 {
    fn from(o: Order) -> u8 {
        o as u8
    }
}

/// Step size for a stencil centred at `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Absolute(f64),
    /// `scale * max(1, |x0|)`
    Relative(f64),
}

impl Default for Step {
    fn default() -> Self {
        Step::Relative(DEFAULT_STEP_SCALE)
    }
}

impl Step {
    pub fn at(self, x0: f64) -> f64 {
        match self {
            Step::Absolute(h) => h,
            Step::Relative(scale) => default_step(x0, scale),
        }
    }
}

pub fn default_step(x0: f64, scale: f64) -> f64 {
    scale * x0.abs().max(1.0)
}

/// Central-difference estimate of the `order`-th derivative of `f` at `x`.
///
/// ```text
/// 1: (f(x+h) - f(x-h)) / 2h
/// 2: (f(x+h) - 2f(x) + f(x-h)) / h^2
/// 3: (f(x+2h) - 2f(x+h) + 2f(x-h) - f(x-2h)) / 2h^3
/// ```
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64, order: u8) -> f64 {
    match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
        _ => panic!("unsupported derivative order {order}"),
    }
}

/// Derivative of `driven` with respect to `driver` at the driver's value in
/// `context`, using the declared response for the pair (state context first,
/// then base). Indeterminate when no response is declared.
pub fn finite_difference(
    s: &Scenario,
    driven: Quantity,
    driver: Quantity,
    order: Order,
    step: Step,
    context: Context,
) -> ExtendedValue {
    let Some(r) = s.response(driven, driver, context) else {
        return ExtendedValue::indeterminate();
    };
    let x0 = s.quantity(driver, context.state());
    let h = step.at(x0);
    ExtendedValue::point(central_difference(|x| r.eval(x), x0, h, order as u8))
}

/// Derivative of the joint probability `a ∩ b` with respect to `driver`,
/// composed from the responses of `a` and `b`. Indeterminate unless both exist.
pub fn joint_finite_difference(
    s: &Scenario,
    a: Symbol,
    b: Symbol,
    driver: Quantity,
    order: Order,
    step: Step,
    context: Context,
    mode: Intersection,
) -> ExtendedValue {
    let (Some(ra), Some(rb)) = (s.response(a.into(), driver, context), s.response(b.into(), driver, context)) else {
        return ExtendedValue::indeterminate();
    };
    let x0 = s.quantity(driver, context.state());
    let h = step.at(x0);
    ExtendedValue::point(central_difference(|x| joint_prob(ra.eval(x), rb.eval(x), mode), x0, h, order as u8))
}
