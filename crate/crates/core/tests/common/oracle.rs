//! Straight-line reference evaluator for the 44 conditions under the default
//! configuration: rel_tol 0.05, zero_tol 0.01, step 1e-3·max(1,|x|), product
//! intersection, vacuous guards, horizon T = 1 with dt = 0.01.
//!
//! Works on [`World`] maps only and shares no code with the library.

use super::world::{horner, World};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum O {
    Sat,
    Vio,
    Vac,
    /// A needed response is missing.
    Ind,
}

const REL_TOL: f64 = 0.05;
const ZERO_TOL: f64 = 0.01;
const STEP: f64 = 1e-3;
const T_END: f64 = 1.0;
const DT: f64 = 0.01;

pub const IDS: [&str; 44] = [
    "B1", "B2", "B3", "B4", "B5", "B6", "B7", "B8", "B9", "B10", "B11", "B12", "B13", "B14", "B15", "B16", "B17",
    "B18", "B19", "W1", "W2", "W3", "W4", "W5", "W6", "W7", "S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8", "S9", "S10",
    "S11", "S12", "S13", "S14", "S15", "S16", "S17", "S18",
];

struct Ctx<'a> {
    w: &'a World,
    missing: bool,
}

impl Ctx<'_> {
    fn b(&self, n: &str) -> f64 {
        self.w.base(n)
    }

    fn at(&self, st: &str, n: &str) -> f64 {
        self.w.under(st, n)
    }

    /// Central difference of the declared response, or NaN when missing.
    fn d(&mut self, driven: &str, driver: &str, order: u8) -> f64 {
        let Some(r) = self.w.response(driven, driver) else {
            self.missing = true;
            return f64::NAN;
        };
        let x = self.w.qty(driver);
        let h = STEP * x.abs().max(1.0);
        let f = |x: f64| horner(&r.coeffs, x - r.center);
        stencil(&f, x, h, order)
    }

    /// Derivative of rho_i * rho_p through their responses to `driver`.
    fn d_joint(&mut self, driver: &str, order: u8) -> f64 {
        let (Some(ri), Some(rp)) = (self.w.response("rho_i", driver), self.w.response("rho_p", driver)) else {
            self.missing = true;
            return f64::NAN;
        };
        let x = self.w.qty(driver);
        let h = STEP * x.abs().max(1.0);
        let f = |x: f64| horner(&ri.coeffs, x - ri.center) * horner(&rp.coeffs, x - rp.center);
        stencil(&f, x, h, order)
    }

    /// Name of the larger of two symbols (first on ties).
    fn larger(&self, a: &'static str, b: &'static str) -> &'static str {
        if self.b(b) > self.b(a) {
            b
        } else {
            a
        }
    }

    /// Listing state with the largest value among `cands`; ties prefer
    /// E_s, then E_p, then E_m.
    fn top_state(&self, cands: &[&'static str]) -> &'static str {
        let rank = |s: &str| ["E_s", "E_p", "E_m"].iter().position(|x| *x == s).unwrap();
        let mut best = cands[0];
        for &c in &cands[1..] {
            let (v, bv) = (self.b(c), self.b(best));
            if v > bv || (v == bv && rank(c) < rank(best)) {
                best = c;
            }
        }
        best
    }
}

fn stencil(f: &dyn Fn(f64) -> f64, x: f64, h: f64, order: u8) -> f64 {
    match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        _ => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
    }
}

fn approx(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1e-12)
}

fn near_zero(a: f64) -> bool {
    a.abs() <= ZERO_TOL
}

fn max(a: f64, b: f64) -> f64 {
    if b > a {
        b
    } else {
        a
    }
}

fn min(a: f64, b: f64) -> f64 {
    if b < a {
        b
    } else {
        a
    }
}

/// Trapezoid rule for `g` on [0, T].
fn integral(g: &dyn Fn(f64) -> f64) -> f64 {
    let panels = ((T_END / DT) - 1e-9).ceil() as usize;
    let mut total = 0.0;
    let mut prev_t = 0.0;
    let mut prev_f = g(0.0);
    for k in 1..=panels {
        let t = if k >= panels { T_END } else { k as f64 * DT };
        let f = g(t);
        total += (t - prev_t) * (prev_f + f) / 2.0;
        prev_t = t;
        prev_f = f;
    }
    total
}

fn all(conds: &[bool]) -> O {
    if conds.iter().all(|&c| c) {
        O::Sat
    } else {
        O::Vio
    }
}

/// Status of condition `id` for `w`.
pub fn oracle(w: &World, id: &str) -> O {
    let mut x = Ctx { w, missing: false };
    let out = eval(&mut x, id);
    if x.missing {
        O::Ind
    } else {
        out
    }
}

fn eval(x: &mut Ctx<'_>, id: &str) -> O {
    let b = |x: &Ctx, n: &str| x.b(n);
    let cp = b(x, "c") * b(x, "P");
    match id {
        "B1" => {
            if !(b(x, "U_iw") > b(x, "U_ip")) {
                return O::Vac;
            }
            all(&[b(x, "I_i") > b(x, "I_p"), b(x, "I_i") + b(x, "I_o") > b(x, "I_p")])
        }
        "B2" => all(&[approx(b(x, "I_i"), b(x, "psi_b"))]),
        "B3" | "B4" => {
            let st = x.top_state(&["E_s", "E_p", "E_m"]);
            let guard = if id == "B3" {
                approx(x.at(st, "P_s"), x.at(st, "P_b"))
            } else {
                x.at(st, "U_iw") > x.at(st, "U_ip")
            };
            if !guard {
                return O::Vac;
            }
            let lhs = x.at(st, "c") * x.at(st, "P") + x.at(st, "psi_b") + x.at(st, "pi_b");
            let rhs = b(x, "psi_bi") + b(x, "pi_i") + b(x, "U_iw");
            all(&[lhs > rhs])
        }
        "B5" => all(&[b(x, "psi_b") > b(x, "psi_bi"), b(x, "U_iw") > b(x, "U_ip")]),
        "B6" => {
            let c2 = x.d("psi_b", "U_ip", 2) < min(x.d("psi_bi", "U_iw", 2), 1.0);
            let c1 = x.d("psi_b", "U_ip", 1) < min(x.d("psi_bi", "U_iw", 1), 1.0);
            all(&[c2, c1])
        }
        "B7" => {
            let c1 = x.d("U_iw", "pi_i", 1) > min(x.d("U_ip", "pi_b", 1), 0.0);
            let c2 = x.d("U_iw", "pi_i", 2) > min(x.d("U_ip", "pi_b", 2), 0.0);
            all(&[c1, c2])
        }
        "B8" => {
            let c2 = x.d("I_o", "psi_bi", 2) > max(x.d("I", "psi_b", 2), 1.0);
            let c1 = x.d("I_o", "psi_bi", 1) > max(x.d("I", "psi_b", 1), 1.0);
            all(&[c2, c1])
        }
        "B9" => {
            let st = x.top_state(&["E_s", "E_p", "E_m"]);
            all(&[x.d("I", st, 1) < 1.0])
        }
        "B10" => {
            let c1 = x.d("I", "U_ip+U_iw", 1) < min(x.d("I_o", "U_a", 1), 1.0);
            let c2 = x.d("I", "U_ip+U_iw", 2) < min(x.d("I_o", "U_a", 2), 1.0);
            all(&[c1, c2])
        }
        "B11" => all(&[x.d("I", "U_ip+U_iw", 3) < 1.0, x.d("I_o", "U_a", 3) < 1.0]),
        "B12" => {
            let c3 = x.d("P_b", "P", 3) > max(x.d("I_o", "I", 3), 1.0);
            let c1 = x.d("P_b", "P", 1) > max(x.d("I_o", "I", 1), 1.0);
            all(&[c3, c1])
        }
        "B13" => all(&[b(x, "u_hat_s") < cp + b(x, "pi_sb") + b(x, "I_p") + b(x, "I_i")]),
        "B14" => all(&[x.d("u_hat_s", "pi_sb+I_p+I_i", 1) < 1.0]),
        "B15" => {
            let lhs = b(x, "SC_b") - b(x, "psi_bi") - b(x, "psi_b");
            let rhs = b(x, "U_ip") + b(x, "U_iw") + b(x, "I_p") + b(x, "I_i") + b(x, "pi_b");
            all(&[lhs > rhs])
        }
        "B16" | "B17" | "B18" | "B19" => {
            let order = if id == "B16" || id == "B18" { 1 } else { 2 };
            let floor = if order == 1 { 1.0 } else { 0.0 };
            let drv = x.larger("psi_bi", "psi_b");
            let lhs = x.d("SC_b", drv, order);
            let inner = if id == "B16" || id == "B17" {
                x.d("U_ip+U_iw", "I_p+I_i+pi_b", order)
            } else {
                x.d_joint("U_ip+U_iw", order)
            };
            all(&[lhs > max(floor, inner)])
        }
        "W1" => {
            let st = "E_p";
            if !(x.at(st, "psi_b") > x.at(st, "psi_bi")) {
                return O::Vac;
            }
            let lhs = x.at(st, "c") * x.at(st, "P") * x.at(st, "rho_p") - x.at(st, "B_b") - x.at(st, "B_s");
            all(&[lhs < x.at(st, "B_i")])
        }
        "W2" => {
            let st = x.top_state(&["E_s", "E_p"]);
            all(&[x.at(st, "U_ip") < x.at(st, "U_iw")])
        }
        "W3" => all(&[b(x, "psi_bi") * b(x, "rho_i") > cp * b(x, "rho_p")]),
        "W4" => all(&[near_zero(x.d("rho_i", "rho_p", 1))]),
        "W5" => {
            let bsum = "B";
            all(&[near_zero(x.d("rho_i", bsum, 1)), near_zero(x.d("rho_p", bsum, 1))])
        }
        "W6" => all(&[x.d("B_i", "I_i", 1) < x.d("RC_br+SC_br", "I_i", 1)]),
        "W7" => all(&[x.d("RC_br+SC_br", "B_i", 1) > 1.0]),
        "S1" => {
            let rs = b(x, "rho_s");
            all(&[rs > b(x, "rho_p") * b(x, "rho_i"), rs > b(x, "rho_p"), rs > b(x, "rho_i")])
        }
        "S2" => {
            let c1 = x.d("I_o", "psi_si", 1) > max(x.d("I_p+I_o", "psi_sb", 1), 1.0);
            let c3 = x.d("I_o", "psi_si", 3) > max(x.d("I_p+I_o", "psi_sb", 3), 1.0);
            all(&[c1, c3])
        }
        "S3" => {
            let c1 = x.d("U_a", "psi_si", 1) > max(x.d("U_sp+U_sw", "psi_s", 1), 1.0);
            let c3 = x.d("U_a", "psi_si", 3) > max(x.d("U_sp+U_sw", "psi_s", 3), 1.0);
            all(&[c1, c3])
        }
        "S4" => {
            let st = x.top_state(&["E_s", "E_p", "E_m"]);
            all(&[b(x, "psi_s") > b(x, "psi_si"), x.at(st, "psi_s") > x.at(st, "psi_si")])
        }
        "S5" => {
            let st = x.top_state(&["E_s", "E_p", "E_m"]);
            all(&[
                b(x, "I_o") > b(x, "I_i") + b(x, "I_p"),
                x.at(st, "I_o") > x.at(st, "I_i") + x.at(st, "I_p"),
            ])
        }
        "S6" => all(&[x.d("P_s", "P", 1) > 1.0]),
        "S7" => all(&[x.d("pi_sb", "U_sp+U_sw", 1) > x.d("pi_s", "U_a", 1), b(x, "pi_sb") > b(x, "pi_s")]),
        "S8" => {
            let c1 = x.d("P", "pi_sb", 1) > max(x.d("P", "pi_s", 1), 1.0);
            let c2 = x.d("P_s", "pi_sb", 1) > max(x.d("P_s", "pi_s", 1), 1.0);
            let c3 = x.d("P_s", "P", 1) > 1.0;
            let c4 = x.d("P", "c", 1) > 1.0;
            all(&[c1, c2, c3, c4])
        }
        "S9" | "S10" | "S11" => {
            let drv = match id {
                "S9" => "P_s",
                "S10" => "c",
                _ => "pi_sb",
            };
            let dc = x.d("psi_sb+pi_sb", drv, 1) > x.d("psi_si+pi_s", drv, 1);
            if id == "S9" {
                all(&[b(x, "psi_sb") + b(x, "pi_sb") > b(x, "psi_si") + b(x, "pi_s"), dc])
            } else {
                all(&[dc])
            }
        }
        "S12" => all(&[b(x, "rho_s") > b(x, "rho_p"), b(x, "rho_s") > b(x, "rho_i")]),
        "S13" => {
            let w = x.w;
            let v = |n: &str, t: f64| w.at_time(n, t);
            let own = |t| v("rho_s", t) * (v("P_s", t) - v("pi_b", t) - v("pi_s", t) - v("psi_si", t));
            let phys = |t| v("rho_p", t) * (v("P", t) - v("pi_b", t) - v("pi_sb", t) - v("psi_s", t));
            let web = |t| v("rho_i", t) * v("rho_p", t) * (v("P", t) - v("pi_b", t) - v("pi_sb", t) - v("psi_sb", t));
            all(&[integral(&own) > max(integral(&phys), integral(&web))])
        }
        "S14" => {
            let lhs = b(x, "SC_s") - b(x, "psi_si") - b(x, "pi_sb") * b(x, "pi_sb");
            let rhs = b(x, "U_sw") + b(x, "U_sp") + b(x, "I_p") + b(x, "I_i") + b(x, "pi_sb");
            all(&[lhs > rhs])
        }
        "S15" | "S16" | "S17" | "S18" => {
            let order = if id == "S15" || id == "S17" { 1 } else { 2 };
            let floor = if order == 1 { 1.0 } else { 0.0 };
            let drv = x.larger("psi_si", "psi_s");
            let lhs = x.d("SC_s", drv, order);
            let inner = if id == "S15" || id == "S16" {
                x.d("U_sp+U_sw", "I_p+I_i+pi_b", order)
            } else {
                x.d_joint("U_sp+U_sw", order)
            };
            all(&[lhs > max(floor, inner)])
        }
        other => panic!("unknown condition {other}"),
    }
}

/// Conjunction over a set's statuses.
pub fn conjunction(statuses: &[O]) -> &'static str {
    if statuses.contains(&O::Vio) {
        "NotSatisfied"
    } else if statuses.contains(&O::Ind) {
        "Indeterminate"
    } else {
        "Satisfied"
    }
}

/// Statuses of every condition whose id starts with `prefix`.
pub fn oracle_set(w: &World, prefix: char) -> Vec<(&'static str, O)> {
    IDS.iter().filter(|id| id.starts_with(prefix)).map(|&id| (id, oracle(w, id))).collect()
}
