use std::collections::BTreeMap;

use crate::scenario::Scenario;
use crate::symbols::{Quantity, State, Symbol};

pub const MAX_POLYNOMIAL_DEGREE: usize = 6;

/// Where a response function or lookup applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Context {
    #[default]
    Base,
    State(State),
}

impl Context {
    pub fn state(self) -> Option<State> {
        match self {
            Context::Base => None,
            Context::State(s) => Some(s),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Context::Base => "base",
            Context::State(s) => s.name(),
        }
    }
}

impl From<Option<State>> for Context {
    fn from(s: Option<State>) -> Self {
        s.map_or(Context::Base, Context::State)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `sum_k coeffs[k] * (x - center)^k`
    Polynomial { coeffs: Vec<f64>, center: f64 },
    /// Linear interpolation between knots, extended linearly past both ends.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

/// A declared functional link `driven = f(driver)` used for derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseFunction {
    pub driven: Quantity,
    pub driver: Quantity,
    pub shape: Shape,
    pub context: Context,
}

impl ResponseFunction {
    pub fn polynomial(driven: impl Into<Quantity>, driver: impl Into<Quantity>, coeffs: Vec<f64>) -> Self {
        ResponseFunction {
            driven: driven.into(),
            driver: driver.into(),
            shape: Shape::Polynomial { coeffs, center: 0.0 },
            context: Context::Base,
        }
    }

    /// Polynomial in `(x - center)`.
    pub fn centered(
        driven: impl Into<Quantity>,
        driver: impl Into<Quantity>,
        center: f64,
        coeffs: Vec<f64>,
    ) -> Self {
        ResponseFunction {
            driven: driven.into(),
            driver: driver.into(),
            shape: Shape::Polynomial { coeffs, center },
            context: Context::Base,
        }
    }

    pub fn piecewise_linear(driven: impl Into<Quantity>, driver: impl Into<Quantity>, knots: Vec<(f64, f64)>) -> Self {
        ResponseFunction {
            driven: driven.into(),
            driver: driver.into(),
            shape: Shape::PiecewiseLinear { knots },
            context: Context::Base,
        }
    }

    pub fn in_context(mut self, context: Context) -> Self {
        self.context = context;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Polynomial { coeffs, center } => {
                let t = x - center;
                coeffs.iter().rev().fold(0.0, |acc, &a| acc * t + a)
            }
            Shape::PiecewiseLinear { knots } => eval_piecewise(knots, x),
        }
    }

    /// Shift the response vertically so that `f(x0) = y0`. Slopes and
    /// curvature are unchanged.
    pub fn reanchor(&mut self, x0: f64, y0: f64) {
        let delta = y0 - self.eval(x0);
        if delta == 0.0 {
            return;
        }
        match &mut self.shape {
            Shape::Polynomial { coeffs, .. } => {
                if coeffs.is_empty() {
                    coeffs.push(delta);
                } else {
                    coeffs[0] += delta;
                }
            }
            Shape::PiecewiseLinear { knots } => {
                for k in knots.iter_mut() {
                    k.1 += delta;
                }
            }
        }
    }

    pub fn key(&self) -> (Quantity, Quantity, Context) {
        (self.driven, self.driver, self.context)
    }
}

fn eval_piecewise(knots: &[(f64, f64)], x: f64) -> f64 {
    match knots.len() {
        0 => f64::NAN,
        1 => knots[0].1,
        n => {
            // Index of the segment [k, k+1] used for x; the end segments extrapolate.
            let seg = match knots.iter().position(|&(kx, _)| kx > x) {
                None => n - 2,
                Some(0) => 0,
                Some(i) => (i - 1).min(n - 2),
            };
            let (x0, y0) = knots[seg];
            let (x1, y1) = knots[seg + 1];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}

/// Symbol overrides applied when a quantity is evaluated under a listing state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateOverlay {
    pub state: State,
    pub overrides: BTreeMap<Symbol, f64>,
}

impl StateOverlay {
    pub fn new(state: State) -> Self {
        StateOverlay { state, overrides: BTreeMap::new() }
    }

    pub fn with(mut self, symbol: Symbol, value: f64) -> Self {
        self.overrides.insert(symbol, value);
        self
    }

    /// Copy of `scenario` with this overlay's values written into the base.
    pub fn apply(&self, scenario: &Scenario) -> Scenario {
        let mut out = scenario.clone();
        for (&sym, &v) in &self.overrides {
            out.set(sym, v);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathKind {
    Constant { value: f64 },
    Linear { intercept: f64, slope: f64 },
    /// Linear interpolation between samples; `None` marks an unknown value.
    Samples { times: Vec<f64>, values: Vec<Option<f64>> },
}

/// Value of a symbol along the integration horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePath {
    pub symbol: Symbol,
    pub kind: PathKind,
}

impl TimePath {
    pub fn constant(symbol: Symbol, value: f64) -> Self {
        TimePath { symbol, kind: PathKind::Constant { value } }
    }

    pub fn linear(symbol: Symbol, intercept: f64, slope: f64) -> Self {
        TimePath { symbol, kind: PathKind::Linear { intercept, slope } }
    }

    /// `None` when the path is unknown at `t` (a missing sample).
    pub fn value_at(&self, t: f64) -> Option<f64> {
        match &self.kind {
            PathKind::Constant { value } => Some(*value),
            PathKind::Linear { intercept, slope } => Some(intercept + slope * t),
            PathKind::Samples { times, values } => {
                if times.is_empty() {
                    return None;
                }
                if let Some(i) = times.iter().position(|&ti| ti == t) {
                    return values[i];
                }
                let hi = times.iter().position(|&ti| ti > t)?;
                if hi == 0 {
                    return None;
                }
                let (t0, t1) = (times[hi - 1], times[hi]);
                let (v0, v1) = (values[hi - 1]?, values[hi]?);
                Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
            }
        }
    }

    pub fn covers(&self, horizon: f64) -> bool {
        match &self.kind {
            PathKind::Samples { times, .. } => {
                matches!((times.first(), times.last()), (Some(&a), Some(&b)) if a <= 0.0 && b >= horizon)
            }
            _ => true,
        }
    }
}
