//! Test-side scenario representation: plain name/value maps that serialize to
//! the scenario file format, plus a seeded generator of valid scenarios.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

/// Every numeric field of a scenario file, in file order.
pub const FIELDS: [&str; 41] = [
    "P", "P_b", "P_s", "c", "B_b", "B_n", "B_op", "B_s", "B_i", "B_it", "I", "I_p", "I_i", "I_o", "psi_b", "psi_bi",
    "psi_s", "psi_si", "psi_sb", "U_ip", "U_iw", "U_a", "U_sp", "U_sw", "U_sa", "pi_b", "pi_i", "pi_sb", "pi_s", "E_s",
    "E_p", "E_m", "rho_p", "rho_i", "rho_s", "u_hat", "u_hat_s", "RC_br", "SC_br", "SC_s", "SC_b",
];

pub const STATES: [&str; 3] = ["E_s", "E_p", "E_m"];

#[derive(Debug, Clone, PartialEq)]
pub struct Resp {
    pub driven: String,
    pub driver: String,
    pub coeffs: Vec<f64>,
    pub center: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub label: String,
    pub v: BTreeMap<String, f64>,
    /// state name -> overridden symbol -> value
    pub overlays: BTreeMap<String, BTreeMap<String, f64>>,
    pub responses: Vec<Resp>,
    /// symbol -> (intercept, slope) of a linear time path
    pub paths: BTreeMap<String, (f64, f64)>,
}

pub fn horner(coeffs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for a in coeffs.iter().rev() {
        acc = acc * t + a;
    }
    acc
}

impl World {
    pub fn base(&self, name: &str) -> f64 {
        self.v[name]
    }

    pub fn under(&self, state: &str, name: &str) -> f64 {
        self.overlays.get(state).and_then(|o| o.get(name)).copied().unwrap_or_else(|| self.base(name))
    }

    /// Value of a symbol or a `+`-joined sum of symbols at base.
    pub fn qty(&self, name: &str) -> f64 {
        // `B` is the total of the four broker cost fields.
        let name = if name == "B" { "B_b+B_s+B_i+B_n" } else { name };
        let mut terms = name.split('+');
        let first = self.base(terms.next().unwrap());
        terms.fold(first, |acc, t| acc + self.base(t))
    }

    /// Value of a symbol at time `t`: its path when declared, else base.
    pub fn at_time(&self, name: &str, t: f64) -> f64 {
        match self.paths.get(name) {
            Some(&(a, b)) => a + b * t,
            None => self.base(name),
        }
    }

    pub fn response(&self, driven: &str, driver: &str) -> Option<&Resp> {
        self.responses.iter().find(|r| r.driven == driven && r.driver == driver)
    }

    /// Declare `driven = f(driver)` with the given slope coefficients
    /// (degree 1 upward), anchored so that f(driver) = driven now.
    pub fn declare(&mut self, driven: &str, driver: &str, slopes: &[f64], centered: bool) {
        let x0 = self.qty(driver);
        let y0 = self.qty(driven);
        let center = if centered { x0 } else { 0.0 };
        let mut coeffs = vec![0.0];
        coeffs.extend_from_slice(slopes);
        coeffs[0] = y0 - horner(&coeffs, x0 - center);
        self.responses.retain(|r| !(r.driven == driven && r.driver == driver));
        self.responses.push(Resp { driven: driven.into(), driver: driver.into(), coeffs, center });
    }

    pub fn to_json(&self) -> String {
        let mut m = Map::new();
        m.insert("label".into(), json!(self.label));
        for f in FIELDS {
            m.insert(f.into(), json!(self.v[f]));
        }
        m.insert("prospect_count".into(), json!(3));
        let overlays: Vec<Value> = self
            .overlays
            .iter()
            .filter(|(_, o)| !o.is_empty())
            .map(|(st, o)| json!({"state": st, "overrides": o}))
            .collect();
        m.insert("overlays".into(), Value::Array(overlays));
        let responses: Vec<Value> = self
            .responses
            .iter()
            .map(|r| {
                json!({"kind": "polynomial", "driven": r.driven, "driver": r.driver, "coeffs": r.coeffs, "center": r.center})
            })
            .collect();
        m.insert("responses".into(), Value::Array(responses));
        let paths: Vec<Value> = self
            .paths
            .iter()
            .map(|(s, (a, b))| json!({"kind": "linear", "symbol": s, "intercept": a, "slope": b}))
            .collect();
        m.insert("time_paths".into(), Value::Array(paths));
        serde_json::to_string_pretty(&Value::Object(m)).unwrap()
    }

    pub fn scenario(&self) -> dismed_core::scenario::Scenario {
        dismed_core::io::scenario_from_json(&self.to_json()).unwrap_or_else(|e| panic!("{}: {e}", self.label))
    }

    pub fn set(&mut self, name: &str, x: f64) {
        *self.v.get_mut(name).unwrap_or_else(|| panic!("unknown field {name}")) = x;
    }

    /// Set a value, keep `I = I_p + I_i`, and shift every response so it
    /// passes through the new values.
    pub fn set_consistent(&mut self, name: &str, x: f64) {
        self.set(name, x);
        let i = self.base("I_p") + self.base("I_i");
        self.set("I", i);
        self.reanchor();
    }

    pub fn reanchor(&mut self) {
        for k in 0..self.responses.len() {
            let r = &self.responses[k];
            let x0 = self.qty(&r.driver);
            let y0 = self.qty(&r.driven);
            let delta = y0 - horner(&r.coeffs, x0 - r.center);
            self.responses[k].coeffs[0] += delta;
        }
    }

    pub fn relabel(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }
}

/// Every (driven, driver) pair any condition differentiates.
pub const RESPONSE_PAIRS: [(&str, &str); 49] = [
    ("psi_b", "U_ip"),
    ("psi_bi", "U_iw"),
    ("U_iw", "pi_i"),
    ("U_ip", "pi_b"),
    ("I_o", "psi_bi"),
    ("I", "psi_b"),
    ("I", "E_s"),
    ("I", "E_p"),
    ("I", "E_m"),
    ("I", "U_ip+U_iw"),
    ("I_o", "U_a"),
    ("P_b", "P"),
    ("I_o", "I"),
    ("u_hat_s", "pi_sb+I_p+I_i"),
    ("SC_b", "psi_bi"),
    ("SC_b", "psi_b"),
    ("U_ip+U_iw", "I_p+I_i+pi_b"),
    ("rho_i", "U_ip+U_iw"),
    ("rho_p", "U_ip+U_iw"),
    ("rho_i", "rho_p"),
    ("rho_i", "B"),
    ("rho_p", "B"),
    ("B_i", "I_i"),
    ("RC_br+SC_br", "I_i"),
    ("RC_br+SC_br", "B_i"),
    ("I_o", "psi_si"),
    ("I_p+I_o", "psi_sb"),
    ("U_a", "psi_si"),
    ("U_sp+U_sw", "psi_s"),
    ("P_s", "P"),
    ("pi_sb", "U_sp+U_sw"),
    ("pi_s", "U_a"),
    ("P", "pi_sb"),
    ("P", "pi_s"),
    ("P", "c"),
    ("P_s", "pi_sb"),
    ("P_s", "pi_s"),
    ("psi_sb+pi_sb", "P_s"),
    ("psi_si+pi_s", "P_s"),
    ("psi_sb+pi_sb", "c"),
    ("psi_si+pi_s", "c"),
    ("psi_sb+pi_sb", "pi_sb"),
    ("psi_si+pi_s", "pi_sb"),
    ("SC_s", "psi_si"),
    ("SC_s", "psi_s"),
    ("U_sp+U_sw", "I_p+I_i+pi_b"),
    ("rho_i", "U_sp+U_sw"),
    ("rho_p", "U_sp+U_sw"),
    ("pi_s", "U_sa"),
];

fn u(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Symbols an overlay may override, with the range drawn from.
const OVERRIDABLE: [(&str, f64, f64); 14] = [
    ("P_s", 50.0, 150.0),
    ("P_b", 50.0, 150.0),
    ("c", 0.01, 0.2),
    ("P", 50.0, 150.0),
    ("psi_b", 0.0, 10.0),
    ("psi_bi", 0.0, 10.0),
    ("pi_b", 0.0, 5.0),
    ("U_iw", 0.0, 10.0),
    ("U_ip", 0.0, 10.0),
    ("rho_p", 0.0, 1.0),
    ("B_b", 0.0, 5.0),
    ("B_s", 0.0, 5.0),
    ("psi_s", 0.0, 10.0),
    ("psi_si", 0.0, 10.0),
];

/// A valid scenario with no responses declared.
pub fn random_bare(seed: u64) -> (World, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = BTreeMap::new();
    let mut put = |name: &str, x: f64| {
        v.insert(name.to_string(), x);
    };
    let p = u(&mut rng, 50.0, 150.0);
    put("P", p);
    let p_s = p * u(&mut rng, 0.8, 1.2);
    put("P_s", p_s);
    let p_b = if rng.random_bool(0.4) { p_s * u(&mut rng, 0.92, 1.08) } else { p * u(&mut rng, 0.5, 1.5) };
    put("P_b", p_b);
    put("c", u(&mut rng, 0.01, 0.2));
    for f in ["B_b", "B_n", "B_op", "B_s", "B_i", "B_it"] {
        put(f, u(&mut rng, 0.0, 5.0));
    }
    let i_p = u(&mut rng, 0.0, 10.0);
    let psi_b = u(&mut rng, 0.0, 10.0);
    let i_i = if rng.random_bool(0.3) { psi_b * u(&mut rng, 0.95, 1.05) } else { u(&mut rng, 0.0, 10.0) };
    put("I_p", i_p);
    put("I_i", i_i);
    put("I", i_p + i_i);
    put("I_o", i_i + u(&mut rng, 0.0, 15.0));
    put("psi_b", psi_b);
    for f in ["psi_bi", "psi_s", "psi_si", "psi_sb", "U_ip", "U_iw", "U_a", "U_sp", "U_sw", "U_sa"] {
        put(f, u(&mut rng, 0.0, 10.0));
    }
    for f in ["pi_b", "pi_i", "pi_sb", "pi_s"] {
        put(f, u(&mut rng, 0.0, 5.0));
    }
    let e_s = u(&mut rng, 0.0, 1.0);
    put("E_s", e_s);
    put("E_p", if rng.random_bool(0.1) { e_s } else { u(&mut rng, 0.0, 1.0) });
    put("E_m", u(&mut rng, 0.0, 1.0));
    for f in ["rho_p", "rho_i", "rho_s"] {
        put(f, u(&mut rng, 0.0, 1.0));
    }
    put("u_hat", u(&mut rng, 0.0, 50.0));
    put("u_hat_s", u(&mut rng, 0.0, 40.0));
    for f in ["RC_br", "SC_br"] {
        put(f, u(&mut rng, 0.0, 10.0));
    }
    put("SC_s", u(&mut rng, 0.0, 60.0));
    put("SC_b", u(&mut rng, 0.0, 60.0));

    let mut overlays = BTreeMap::new();
    for st in STATES {
        if rng.random_bool(0.5) {
            let mut o = BTreeMap::new();
            for _ in 0..rng.random_range(1..=4) {
                let (name, lo, hi) = OVERRIDABLE[rng.random_range(0..OVERRIDABLE.len())];
                o.insert(name.to_string(), u(&mut rng, lo, hi));
            }
            overlays.insert(st.to_string(), o);
        }
    }
    (World { label: format!("random-{seed}"), v, overlays, responses: Vec::new(), paths: BTreeMap::new() }, rng)
}

fn random_slopes(rng: &mut ChaCha8Rng, small: bool) -> Vec<f64> {
    let degree = rng.random_range(1..=4);
    let scale = if small { 0.02 } else { 2.5 };
    (0..degree).map(|_| u(rng, -scale, scale)).collect()
}

/// Declare a random response for every pair in `pairs`.
pub fn declare_all(w: &mut World, rng: &mut ChaCha8Rng, pairs: &[(&str, &str)]) {
    for &(driven, driver) in pairs {
        let small = driven.starts_with("rho") && (driver == "rho_p" || driver == "B") && rng.random_bool(0.5);
        let slopes = random_slopes(rng, small);
        let centered = w.qty(driver).abs() > 10.0 || rng.random_bool(0.5);
        w.declare(driven, driver, &slopes, centered);
    }
}

/// A valid scenario with a response for every differentiated pair.
pub fn random_full(seed: u64) -> World {
    let (mut w, mut rng) = random_bare(seed);
    declare_all(&mut w, &mut rng, &RESPONSE_PAIRS);
    w
}
