use serde::{Deserialize, Serialize};

use crate::scenario::ListingStates;
use crate::symbols::State;

/// Floor on the scale in [`approx_equal`], so two values near zero compare equal.
pub const APPROX_EPSILON: f64 = 1e-12;

/// How `∩` combines two probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intersection {
    /// independent events
    #[default]
    Product,
    /// comonotone events
    Min,
}

/// State with the largest value; ties go to E_s, then E_p, then E_m.
pub fn argmax_state(states: &ListingStates) -> State {
    argmax_state_of(states, &State::ALL)
}

/// [`argmax_state`] restricted to `candidates`.
pub fn argmax_state_of(states: &ListingStates, candidates: &[State]) -> State {
    let mut best = candidates[0];
    for &s in &candidates[1..] {
        let (v, b) = (states.value(s), states.value(best));
        if v > b || (v == b && precedence(s) < precedence(best)) {
            best = s;
        }
    }
    best
}

/// State with the smallest value; ties go to E_m, then E_p, then E_s.
pub fn argmin_state(states: &ListingStates) -> State {
    let mut best = State::Em;
    for s in [State::Ep, State::Es] {
        if states.value(s) < states.value(best) {
            best = s;
        }
    }
    best
}

fn precedence(s: State) -> u8 {
    match s {
        State::Es => 0,
        State::Ep => 1,
        State::Em => 2,
    }
}

/// `|a - b| <= rel_tol * max(|a|, |b|, 1e-12)`.
pub fn approx_equal(a: f64, b: f64, rel_tol: f64) -> bool {
    (a - b).abs() <= rel_tol * a.abs().max(b.abs()).max(APPROX_EPSILON)
}

pub fn joint_prob(a: f64, b: f64, mode: Intersection) -> f64 {
    match mode {
        Intersection::Product => a * b,
        Intersection::Min => a.min(b),
    }
}
