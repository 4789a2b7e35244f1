//! Scenario data model and validation.
//!
//! A [`Scenario`] carries one value for every symbol in [`Symbol::ALL`],
//! grouped into the typed records below, plus per-state overlays, declared
//! response functions and time paths. Validation never fails: problems are
//! returned as a list of [`Violation`]s.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calculus::diff::{central_difference, default_step};
use crate::calculus::response::{Context, PathKind, ResponseFunction, Shape, StateOverlay, TimePath, MAX_POLYNOMIAL_DEGREE};
use crate::symbols::{Quantity, State, Symbol};

/// Relative tolerance of the response consistency rule.
pub const RESPONSE_CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Valuation {
    /// appraised value
    pub p: f64,
    /// value to the buyer
    pub p_b: f64,
    /// value to the seller
    pub p_s: f64,
    /// commission rate
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrokerCosts {
    pub b_b: f64,
    pub b_n: f64,
    pub b_op: f64,
    pub b_s: f64,
    pub b_i: f64,
    pub b_it: f64,
    pub prospect_count: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InformationBundle {
    pub i: f64,
    pub i_p: f64,
    pub i_i: f64,
    pub i_o: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchCosts {
    pub psi_b: f64,
    pub psi_bi: f64,
    pub psi_s: f64,
    pub psi_si: f64,
    pub psi_sb: f64,
    /// Share of buyer search time that is compensated ("valued") rather than leisure.
    pub valued_time_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityProfile {
    pub u_ip: f64,
    pub u_iw: f64,
    pub u_a: f64,
    pub u_sp: f64,
    pub u_sw: f64,
    pub u_sa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosingCosts {
    pub pi_b: f64,
    pub pi_i: f64,
    pub pi_sb: f64,
    pub pi_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ListingStates {
    pub e_s: f64,
    pub e_p: f64,
    pub e_m: f64,
    pub overlays: BTreeMap<State, StateOverlay>,
}

impl ListingStates {
    pub fn value(&self, state: State) -> f64 {
        match state {
            State::Es => self.e_s,
            State::Ep => self.e_p,
            State::Em => self.e_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosingProbabilities {
    pub rho_p: f64,
    pub rho_i: f64,
    pub rho_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrokerEffortCapital {
    pub u_hat: f64,
    pub u_hat_s: f64,
    pub rc_br: f64,
    pub sc_br: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartySocialCapital {
    pub sc_s: f64,
    pub sc_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub valuation: Valuation,
    pub broker_costs: BrokerCosts,
    pub info: InformationBundle,
    pub search: SearchCosts,
    pub utility: UtilityProfile,
    pub closing: ClosingCosts,
    pub states: ListingStates,
    pub probs: ClosingProbabilities,
    pub effort: BrokerEffortCapital,
    pub social: PartySocialCapital,
    pub responses: Vec<ResponseFunction>,
    pub time_paths: Vec<TimePath>,
}

impl Scenario {
    /// A scenario with every symbol at a neutral value that passes validation.
    pub fn neutral(label: impl Into<String>) -> Self {
        Scenario {
            label: label.into(),
            valuation: Valuation { p: 1.0, p_b: 1.0, p_s: 1.0, c: 0.05 },
            broker_costs: BrokerCosts { b_b: 0.0, b_n: 0.0, b_op: 0.0, b_s: 0.0, b_i: 0.0, b_it: 0.0, prospect_count: 1 },
            info: InformationBundle { i: 0.0, i_p: 0.0, i_i: 0.0, i_o: 0.0 },
            search: SearchCosts { psi_b: 0.0, psi_bi: 0.0, psi_s: 0.0, psi_si: 0.0, psi_sb: 0.0, valued_time_share: None },
            utility: UtilityProfile { u_ip: 0.0, u_iw: 0.0, u_a: 0.0, u_sp: 0.0, u_sw: 0.0, u_sa: 0.0 },
            closing: ClosingCosts { pi_b: 0.0, pi_i: 0.0, pi_sb: 0.0, pi_s: 0.0 },
            states: ListingStates { e_s: 0.0, e_p: 0.0, e_m: 0.0, overlays: BTreeMap::new() },
            probs: ClosingProbabilities { rho_p: 0.0, rho_i: 0.0, rho_s: 0.0 },
            effort: BrokerEffortCapital { u_hat: 0.0, u_hat_s: 0.0, rc_br: 0.0, sc_br: 0.0 },
            social: PartySocialCapital { sc_s: 0.0, sc_b: 0.0 },
            responses: Vec::new(),
            time_paths: Vec::new(),
        }
    }

    /// Base value of a symbol.
    pub fn get(&self, sym: Symbol) -> f64 {
        *self.slot(sym)
    }

    /// Overwrite a base value. Does not maintain `I = I_p + I_i`; see
    /// [`Scenario::set_consistent`].
    pub fn set(&mut self, sym: Symbol, value: f64) {
        *self.slot_mut(sym) = value;
    }

    /// Overwrite a base value, keeping `I = I_p + I_i` when a component moves
    /// and re-anchoring every response so the consistency rule still holds.
    pub fn set_consistent(&mut self, sym: Symbol, value: f64) {
        self.set(sym, value);
        if matches!(sym, Symbol::Ip | Symbol::Ii) {
            self.info.i = self.info.i_p + self.info.i_i;
        }
        self.reanchor_responses();
    }

    /// Shift every response vertically so it passes through the scenario's
    /// current (driver, driven) point in its own context.
    pub fn reanchor_responses(&mut self) {
        let mut responses = std::mem::take(&mut self.responses);
        for r in &mut responses {
            let state = r.context.state();
            let x0 = self.quantity(r.driver, state);
            let y0 = self.quantity(r.driven, state);
            r.reanchor(x0, y0);
        }
        self.responses = responses;
    }

    /// Value of a symbol, under the overlay of `state` when given.
    pub fn value(&self, sym: Symbol, state: Option<State>) -> f64 {
        state
            .and_then(|st| self.states.overlays.get(&st))
            .and_then(|ov| ov.overrides.get(&sym).copied())
            .unwrap_or_else(|| self.get(sym))
    }

    /// Value of a symbol or composite sum, under `state` when given.
    pub fn quantity(&self, q: Quantity, state: Option<State>) -> f64 {
        match q {
            Quantity::Symbol(s) => self.value(s, state),
            Quantity::Composite(_) => q.terms().iter().map(|&s| self.value(s, state)).sum(),
        }
    }

    /// Response declared for `(driven, driver)` in `context`, falling back to
    /// the base context.
    pub fn response(&self, driven: Quantity, driver: Quantity, context: Context) -> Option<&ResponseFunction> {
        let find = |ctx: Context| {
            self.responses
                .iter()
                .find(|r| r.driven == driven && r.driver == driver && r.context == ctx)
        };
        find(context).or_else(|| if context == Context::Base { None } else { find(Context::Base) })
    }

    pub fn time_path(&self, sym: Symbol) -> Option<&TimePath> {
        self.time_paths.iter().find(|p| p.symbol == sym)
    }

    pub fn overlay(&self, state: State) -> Option<&StateOverlay> {
        self.states.overlays.get(&state)
    }

    fn slot(&self, sym: Symbol) -> &f64 {
        use Symbol::*;
        match sym {
            P => &self.valuation.p,
            Pb => &self.valuation.p_b,
            Ps => &self.valuation.p_s,
            C => &self.valuation.c,
            Bb => &self.broker_costs.b_b,
            Bn => &self.broker_costs.b_n,
            Bop => &self.broker_costs.b_op,
            Bs => &self.broker_costs.b_s,
            Bi => &self.broker_costs.b_i,
            Bit => &self.broker_costs.b_it,
            I => &self.info.i,
            Ip => &self.info.i_p,
            Ii => &self.info.i_i,
            Io => &self.info.i_o,
            PsiB => &self.search.psi_b,
            PsiBi => &self.search.psi_bi,
            PsiS => &self.search.psi_s,
            PsiSi => &self.search.psi_si,
            PsiSb => &self.search.psi_sb,
            Uip => &self.utility.u_ip,
            Uiw => &self.utility.u_iw,
            Ua => &self.utility.u_a,
            Usp => &self.utility.u_sp,
            Usw => &self.utility.u_sw,
            Usa => &self.utility.u_sa,
            PiB => &self.closing.pi_b,
            PiI => &self.closing.pi_i,
            PiSb => &self.closing.pi_sb,
            PiS => &self.closing.pi_s,
            Es => &self.states.e_s,
            Ep => &self.states.e_p,
            Em => &self.states.e_m,
            RhoP => &self.probs.rho_p,
            RhoI => &self.probs.rho_i,
            RhoS => &self.probs.rho_s,
            UHat => &self.effort.u_hat,
            UHatS => &self.effort.u_hat_s,
            RcBr => &self.effort.rc_br,
            ScBr => &self.effort.sc_br,
            ScS => &self.social.sc_s,
            ScB => &self.social.sc_b,
        }
    }

    fn slot_mut(&mut self, sym: Symbol) -> &mut f64 {
        use Symbol::*;
        match sym {
            P => &mut self.valuation.p,
            Pb => &mut self.valuation.p_b,
            Ps => &mut self.valuation.p_s,
            C => &mut self.valuation.c,
            Bb => &mut self.broker_costs.b_b,
            Bn => &mut self.broker_costs.b_n,
            Bop => &mut self.broker_costs.b_op,
            Bs => &mut self.broker_costs.b_s,
            Bi => &mut self.broker_costs.b_i,
            Bit => &mut self.broker_costs.b_it,
            I => &mut self.info.i,
            Ip => &mut self.info.i_p,
            Ii => &mut self.info.i_i,
            Io => &mut self.info.i_o,
            PsiB => &mut self.search.psi_b,
            PsiBi => &mut self.search.psi_bi,
            PsiS => &mut self.search.psi_s,
            PsiSi => &mut self.search.psi_si,
            PsiSb => &mut self.search.psi_sb,
            Uip => &mut self.utility.u_ip,
            Uiw => &mut self.utility.u_iw,
            Ua => &mut self.utility.u_a,
            Usp => &mut self.utility.u_sp,
            Usw => &mut self.utility.u_sw,
            Usa => &mut self.utility.u_sa,
            PiB => &mut self.closing.pi_b,
            PiI => &mut self.closing.pi_i,
            PiSb => &mut self.closing.pi_sb,
            PiS => &mut self.closing.pi_s,
            Es => &mut self.states.e_s,
            Ep => &mut self.states.e_p,
            Em => &mut self.states.e_m,
            RhoP => &mut self.probs.rho_p,
            RhoI => &mut self.probs.rho_i,
            RhoS => &mut self.probs.rho_s,
            UHat => &mut self.effort.u_hat,
            UHatS => &mut self.effort.u_hat_s,
            RcBr => &mut self.effort.rc_br,
            ScBr => &mut self.effort.sc_br,
            ScS => &mut self.social.sc_s,
            ScB => &mut self.social.sc_b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    NonFinite,
    NonPositivePrice,
    CommissionOutOfRange,
    ProspectCountZero,
    InformationIdentity,
    InformationInclusion,
    ValuedTimeShareOutOfRange,
    ProbabilityOutOfRange,
    UnknownSymbol,
    OverlayOverridesState,
    OverlayStateMismatch,
    SelfReferentialResponse,
    DuplicateResponse,
    EmptyResponse,
    PolynomialDegree,
    KnotsNotIncreasing,
    ResponseInconsistent,
    InformationMonotonicity,
    DuplicateTimePath,
    InvalidTimePath,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// What the violation is about: a symbol name, a response key, ...
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): {}", self.kind, self.subject, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport { ok: violations.is_empty(), violations }
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Round to 12 significant digits; the canonical form used for the
/// information identity check.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

struct Collector(Vec<Violation>);

impl Collector {
    fn push(&mut self, kind: ViolationKind, subject: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation { kind, subject: subject.into(), message: message.into() });
    }
}

/// Check every type invariant of `s`. Deterministic and side-effect free.
pub fn validate_scenario(s: &Scenario) -> ValidationReport {
    let mut out = Collector(Vec::new());

    for &sym in Symbol::ALL {
        let v = s.get(sym);
        if !v.is_finite() {
            out.push(ViolationKind::NonFinite, sym.name(), format!("{sym} = {v} is not finite"));
        }
    }
    check_value_invariants(s, None, &mut out);

    if s.broker_costs.prospect_count < 1 {
        out.push(ViolationKind::ProspectCountZero, "prospect_count", "prospect_count must be at least 1");
    }
    if let Some(share) = s.search.valued_time_share {
        if !(0.0..=1.0).contains(&share) {
            out.push(
                ViolationKind::ValuedTimeShareOutOfRange,
                "valued_time_share",
                format!("valued_time_share = {share} outside [0, 1]"),
            );
        }
    }

    for (&state, overlay) in &s.states.overlays {
        if overlay.state != state {
            out.push(
                ViolationKind::OverlayStateMismatch,
                state.name(),
                format!("overlay stored under {state} declares state {}", overlay.state),
            );
        }
        for (&sym, &v) in &overlay.overrides {
            if sym.is_listing_state() {
                out.push(
                    ViolationKind::OverlayOverridesState,
                    format!("{state}:{sym}"),
                    "overlays may not override listing-state values",
                );
            }
            if !v.is_finite() {
                out.push(ViolationKind::NonFinite, format!("{state}:{sym}"), format!("override {v} is not finite"));
            }
        }
        check_value_invariants(s, Some(state), &mut out);
    }

    check_responses(s, &mut out);
    check_time_paths(s, &mut out);

    ValidationReport::from_violations(out.0)
}

fn check_value_invariants(s: &Scenario, state: Option<State>, out: &mut Collector) {
    let prefix = state.map(|st| format!("{st}:")).unwrap_or_default();
    let v = |sym| s.value(sym, state);

    for sym in [Symbol::P, Symbol::Pb] {
        if !(v(sym) > 0.0) {
            out.push(ViolationKind::NonPositivePrice, format!("{prefix}{sym}"), format!("{sym} = {} must be > 0", v(sym)));
        }
    }
    let c = v(Symbol::C);
    if !(c > 0.0 && c < 1.0) {
        out.push(ViolationKind::CommissionOutOfRange, format!("{prefix}c"), format!("c = {c} outside (0, 1)"));
    }
    for sym in [Symbol::RhoP, Symbol::RhoI, Symbol::RhoS] {
        let p = v(sym);
        if !(0.0..=1.0).contains(&p) {
            out.push(ViolationKind::ProbabilityOutOfRange, format!("{prefix}{sym}"), format!("{sym} = {p} outside [0, 1]"));
        }
    }
    let (i, i_p, i_i, i_o) = (v(Symbol::I), v(Symbol::Ip), v(Symbol::Ii), v(Symbol::Io));
    if round_significant(i) != round_significant(i_p + i_i) {
        out.push(
            ViolationKind::InformationIdentity,
            format!("{prefix}I"),
            format!("I = {i} but I_p + I_i = {}", i_p + i_i),
        );
    }
    if !(i_o >= i_i) {
        out.push(ViolationKind::InformationInclusion, format!("{prefix}I_o"), format!("I_o = {i_o} < I_i = {i_i}"));
    }
}

fn check_responses(s: &Scenario, out: &mut Collector) {
    let mut seen = BTreeSet::new();
    for r in &s.responses {
        let subject = format!("{}({})@{}", r.driven, r.driver, r.context.name());
        if !seen.insert(r.key()) {
            out.push(ViolationKind::DuplicateResponse, &subject, "more than one response for this pair and context");
        }
        if r.driven == r.driver {
            out.push(ViolationKind::SelfReferentialResponse, &subject, "driver and driven must differ");
        }
        match &r.shape {
            Shape::Polynomial { coeffs, center } => {
                if coeffs.is_empty() {
                    out.push(ViolationKind::EmptyResponse, &subject, "polynomial has no coefficients");
                    continue;
                }
                if coeffs.len() > MAX_POLYNOMIAL_DEGREE + 1 {
                    out.push(
                        ViolationKind::PolynomialDegree,
                        &subject,
                        format!("degree {} exceeds {MAX_POLYNOMIAL_DEGREE}", coeffs.len() - 1),
                    );
                }
                if !center.is_finite() || coeffs.iter().any(|a| !a.is_finite()) {
                    out.push(ViolationKind::NonFinite, &subject, "non-finite polynomial parameter");
                    continue;
                }
            }
            Shape::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    out.push(ViolationKind::KnotsNotIncreasing, &subject, "need at least two knots");
                    continue;
                }
                if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                    out.push(ViolationKind::NonFinite, &subject, "non-finite knot");
                    continue;
                }
                if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    out.push(ViolationKind::KnotsNotIncreasing, &subject, "knot abscissae must be strictly increasing");
                    continue;
                }
            }
        }

        let state = r.context.state();
        let x0 = s.quantity(r.driver, state);
        let y0 = s.quantity(r.driven, state);
        let fx = r.eval(x0);
        if !((fx - y0).abs() <= RESPONSE_CONSISTENCY_TOL * y0.abs().max(1.0)) {
            out.push(
                ViolationKind::ResponseInconsistent,
                &subject,
                format!("f({x0}) = {fx} but the scenario holds {y0}"),
            );
        }

        if r.driven == Quantity::Symbol(Symbol::I) && r.driver == Quantity::Symbol(Symbol::Bb) {
            let h = default_step(x0, 1e-3);
            let first = central_difference(|x| r.eval(x), x0, h, 1);
            let second = central_difference(|x| r.eval(x), x0, h, 2);
            if !(first > 0.0 && second > 0.0) {
                out.push(
                    ViolationKind::InformationMonotonicity,
                    &subject,
                    format!("dI/dB_b = {first:.6}, d2I/dB_b2 = {second:.6}; both must be > 0"),
                );
            }
        }
    }
}

fn check_time_paths(s: &Scenario, out: &mut Collector) {
    let mut seen = BTreeSet::new();
    for p in &s.time_paths {
        let subject = format!("path:{}", p.symbol);
        if !seen.insert(p.symbol) {
            out.push(ViolationKind::DuplicateTimePath, &subject, "more than one time path for this symbol");
        }
        match &p.kind {
            PathKind::Constant { value } => {
                if !value.is_finite() {
                    out.push(ViolationKind::NonFinite, &subject, "non-finite constant path");
                }
            }
            PathKind::Linear { intercept, slope } => {
                if !intercept.is_finite() || !slope.is_finite() {
                    out.push(ViolationKind::NonFinite, &subject, "non-finite linear path");
                }
            }
            PathKind::Samples { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    out.push(ViolationKind::InvalidTimePath, &subject, "times and values must be non-empty and equal length");
                } else if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
                    out.push(ViolationKind::InvalidTimePath, &subject, "sample times must be finite and strictly increasing");
                }
            }
        }
    }
}
