//! Expression trees over scenario symbols and their interval evaluation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::diff::{finite_difference, joint_finite_difference, Order, Step, DEFAULT_STEP_SCALE};
use super::interval::ExtendedValue;
use super::ops::{argmax_state_of, Intersection};
use super::response::Context;
use super::CalcError;
use crate::scenario::Scenario;
use crate::symbols::{Quantity, State, Symbol};

/// Integration horizon `[0, T]` and trapezoid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    #[serde(rename = "T")]
    pub t: f64,
    pub dt: f64,
}

impl Default for Horizon {
    fn default() -> Self {
        Horizon { t: 1.0, dt: 0.01 }
    }
}

/// Numeric settings shared by every evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalcSettings {
    pub step_scale: f64,
    pub intersection: Intersection,
    pub horizon: Horizon,
}

impl Default for CalcSettings {
    fn default() -> Self {
        CalcSettings { step_scale: DEFAULT_STEP_SCALE, intersection: Intersection::Product, horizon: Horizon::default() }
    }
}

/// Which listing state a conditioned sub-expression is evaluated under.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSelector {
    Fixed(State),
    /// The candidate with the largest state value (ties: E_s, E_p, E_m).
    ArgMax(Vec<State>),
}

impl StateSelector {
    pub fn all() -> Self {
        StateSelector::ArgMax(State::ALL.to_vec())
    }

    pub fn resolve(&self, s: &Scenario) -> State {
        match self {
            StateSelector::Fixed(st) => *st,
            StateSelector::ArgMax(cands) => argmax_state_of(&s.states, cands),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Differentiand {
    Quantity(Quantity),
    /// `a ∩ b`, composed from the responses of both probabilities.
    Joint(Symbol, Symbol),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Differentiator {
    Quantity(Quantity),
    /// `Max(x, y, ...)`: the argument attaining the maximum (first listed on ties).
    MaxOf(Vec<Symbol>),
    /// `Max(E_m, E_p, E_s)`: the state symbol attaining the maximum.
    MaxState(Vec<State>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub of: Differentiand,
    pub wrt: Differentiator,
    pub order: Order,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Sym(Symbol),
    Qty(Quantity),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Max(Vec<Expr>),
    Min(Vec<Expr>),
    /// Probability intersection.
    Joint(Box<Expr>, Box<Expr>),
    Deriv(Derivative),
    /// Evaluate the inner expression under a listing-state overlay.
    Under(StateSelector, Box<Expr>),
    /// Trapezoid integral of the inner expression over the horizon.
    Integral(Box<Expr>),
}

impl Expr {
    pub fn sym(s: Symbol) -> Expr {
        Expr::Sym(s)
    }

    pub fn qty(q: impl Into<Quantity>) -> Expr {
        match q.into() {
            Quantity::Symbol(s) => Expr::Sym(s),
            q => Expr::Qty(q),
        }
    }

    /// Left-to-right sum of symbols.
    pub fn sum(syms: &[Symbol]) -> Expr {
        let mut it = syms.iter().map(|&s| Expr::Sym(s));
        let first = it.next().expect("empty sum");
        it.fold(first, |acc, e| Expr::Add(Box::new(acc), Box::new(e)))
    }

    pub fn deriv(of: impl Into<Quantity>, wrt: impl Into<Quantity>, order: Order) -> Expr {
        Expr::Deriv(Derivative {
            of: Differentiand::Quantity(of.into()),
            wrt: Differentiator::Quantity(wrt.into()),
            order,
        })
    }

    pub fn under(sel: StateSelector, e: Expr) -> Expr {
        Expr::Under(sel, Box::new(e))
    }

    /// Base symbols referenced directly (not through derivatives).
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Const(_) | Expr::Deriv(_) => {}
            Expr::Sym(s) => {
                out.insert(*s);
            }
            Expr::Qty(q) => out.extend(q.terms().iter().copied()),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Joint(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Expr::Neg(a) | Expr::Under(_, a) | Expr::Integral(a) => a.collect_symbols(out),
            Expr::Max(v) | Expr::Min(v) => v.iter().for_each(|e| e.collect_symbols(out)),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

/// Evaluates expressions over one scenario and records interpretation notes
/// (missing responses, unresolved integrals) along the way.
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    settings: CalcSettings,
    notes: Vec<String>,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario, settings: CalcSettings) -> Self {
        Evaluator { scenario, settings, notes: Vec::new() }
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn take_notes(&mut self) -> Vec<String> {
        std::mem::take(&mut self.notes)
    }

    fn note(&mut self, msg: String) {
        if !self.notes.contains(&msg) {
            self.notes.push(msg);
        }
    }

    pub fn eval(&mut self, e: &Expr, state: Option<State>) -> Result<ExtendedValue, CalcError> {
        self.eval_at(e, state, None)
    }

    fn eval_at(&mut self, e: &Expr, state: Option<State>, time: Option<f64>) -> Result<ExtendedValue, CalcError> {
        let s = self.scenario;
        Ok(match e {
            Expr::Const(x) => ExtendedValue::point(*x),
            Expr::Sym(sym) => self.symbol_value(*sym, state, time),
            Expr::Qty(q) => {
                let mut acc: Option<ExtendedValue> = None;
                for &sym in q.terms() {
                    let v = self.symbol_value(sym, state, time);
                    acc = Some(acc.map_or(v, |a| a + v));
                }
                acc.unwrap_or(ExtendedValue::point(0.0))
            }
            Expr::Add(a, b) => self.eval_at(a, state, time)? + self.eval_at(b, state, time)?,
            Expr::Sub(a, b) => self.eval_at(a, state, time)? - self.eval_at(b, state, time)?,
            Expr::Mul(a, b) => self.eval_at(a, state, time)? * self.eval_at(b, state, time)?,
            Expr::Div(a, b) => {
                let num = self.eval_at(a, state, time)?;
                let den = self.eval_at(b, state, time)?;
                num.checked_div(den).ok_or(CalcError::DivisionByZeroInterval)?
            }
            Expr::Neg(a) => -self.eval_at(a, state, time)?,
            Expr::Max(args) => self.fold(args, state, time, ExtendedValue::max)?,
            Expr::Min(args) => self.fold(args, state, time, ExtendedValue::min)?,
            Expr::Joint(a, b) => {
                let x = self.eval_at(a, state, time)?;
                let y = self.eval_at(b, state, time)?;
                match self.settings.intersection {
                    Intersection::Product => x * y,
                    Intersection::Min => x.min(y),
                }
            }
            Expr::Deriv(d) => self.derivative(d, state),
            Expr::Under(sel, inner) => {
                let st = sel.resolve(s);
                self.eval_at(inner, Some(st), time)?
            }
            Expr::Integral(inner) => {
                let Horizon { t, dt } = self.settings.horizon;
                match self.integrate(inner, state, t, dt) {
                    Ok(v) => ExtendedValue::point(v),
                    Err(err @ (CalcError::IndeterminateIntegrand { .. } | CalcError::PathCoverage { .. })) => {
                        self.note(format!("integral unresolved: {err}"));
                        ExtendedValue::indeterminate()
                    }
                    Err(err) => return Err(err),
                }
            }
        })
    }

    fn fold(
        &mut self,
        args: &[Expr],
        state: Option<State>,
        time: Option<f64>,
        f: fn(ExtendedValue, ExtendedValue) -> ExtendedValue,
    ) -> Result<ExtendedValue, CalcError> {
        let mut acc: Option<ExtendedValue> = None;
        for a in args {
            let v = self.eval_at(a, state, time)?;
            acc = Some(acc.map_or(v, |x| f(x, v)));
        }
        acc.ok_or_else(|| CalcError::InvalidArgument("Max/Min of no arguments".into()))
    }

    fn symbol_value(&self, sym: Symbol, state: Option<State>, time: Option<f64>) -> ExtendedValue {
        if let Some(t) = time {
            if let Some(path) = self.scenario.time_path(sym) {
                return path.value_at(t).map_or_else(ExtendedValue::indeterminate, ExtendedValue::point);
            }
        }
        ExtendedValue::point(self.scenario.value(sym, state))
    }

    fn derivative(&mut self, d: &Derivative, state: Option<State>) -> ExtendedValue {
        let s = self.scenario;
        let driver = match &d.wrt {
            Differentiator::Quantity(q) => *q,
            Differentiator::MaxOf(syms) => {
                let mut best = syms[0];
                for &x in &syms[1..] {
                    if s.value(x, state) > s.value(best, state) {
                        best = x;
                    }
                }
                Quantity::Symbol(best)
            }
            Differentiator::MaxState(cands) => Quantity::Symbol(argmax_state_of(&s.states, cands).symbol()),
        };
        let step = Step::Relative(self.settings.step_scale);
        let ctx = Context::from(state);
        match &d.of {
            Differentiand::Quantity(q) => {
                let v = finite_difference(s, *q, driver, d.order, step, ctx);
                if v.is_indeterminate() {
                    self.note(format!("missing response ({}, {})", q, driver));
                }
                v
            }
            Differentiand::Joint(a, b) => {
                let v = joint_finite_difference(s, *a, *b, driver, d.order, step, ctx, self.settings.intersection);
                if v.is_indeterminate() {
                    for sym in [a, b] {
                        if s.response((*sym).into(), driver, ctx).is_none() {
                            self.note(format!("missing response ({}, {})", sym, driver));
                        }
                    }
                }
                v
            }
        }
    }

    /// Trapezoid rule over `[0, t_end]` at spacing `dt`; the last panel is
    /// shortened when `dt` does not divide the horizon.
    pub fn integrate(&mut self, integrand: &Expr, state: Option<State>, t_end: f64, dt: f64) -> Result<f64, CalcError> {
        if !(t_end > 0.0 && dt > 0.0 && dt <= t_end) {
            return Err(CalcError::InvalidArgument(format!("need T > 0 and 0 < dt <= T, got T = {t_end}, dt = {dt}")));
        }
        for sym in integrand.symbols() {
            if let Some(path) = self.scenario.time_path(sym) {
                if !path.covers(t_end) {
                    return Err(CalcError::PathCoverage { symbol: sym, horizon: t_end });
                }
            }
        }
        let panels = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
        let node = |k: usize| if k >= panels { t_end } else { k as f64 * dt };
        let value_at = |ev: &mut Self, t: f64| -> Result<f64, CalcError> {
            ev.eval_at(integrand, state, Some(t))?
                .as_point()
                .ok_or(CalcError::IndeterminateIntegrand { time: t })
        };
        let mut total = 0.0;
        let mut prev_t = 0.0;
        let mut prev_f = value_at(self, 0.0)?;
        for k in 1..=panels {
            let t = node(k);
            let f = value_at(self, t)?;
            total += (t - prev_t) * (prev_f + f) / 2.0;
            prev_t = t;
            prev_f = f;
        }
        Ok(total)
    }
}

/// Evaluate `expr` over `s` under `state` (base when `None`).
pub fn evaluate_expression(
    s: &Scenario,
    expr: &Expr,
    state: Option<State>,
    settings: &CalcSettings,
) -> Result<ExtendedValue, CalcError> {
    Evaluator::new(s, *settings).eval(expr, state)
}

/// Trapezoid integral of `integrand` over `[0, t_end]`. Symbols without a
/// time path hold their base value.
pub fn integrate_horizon(s: &Scenario, integrand: &Expr, t_end: f64, dt: f64, settings: &CalcSettings) -> Result<f64, CalcError> {
    Evaluator::new(s, *settings).integrate(integrand, None, t_end, dt)
}
