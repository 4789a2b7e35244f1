//! The 44 conditions as expression trees, in printed order.
//!
//! Each condition is a conjunction of clauses, optionally behind a guard.
//! Conditioning on listing states is expressed with [`Expr::Under`];
//! everything else is evaluated at base values.

use crate::calculus::{Derivative, Differentiand, Differentiator, Expr, Order, StateSelector};
use crate::config::{B1Mode, EvalConfig};
use crate::symbols::{Composite, Quantity, State, Symbol};

use super::id::{ConditionId, ConditionSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Gt,
    Lt,
    /// `lhs ≈ rhs` within the relative tolerance
    Approx,
    /// `lhs ≈ 0` within the absolute tolerance; `rhs` is the constant 0
    ApproxZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub text: String,
    pub lhs: Expr,
    pub cmp: Comparison,
    pub rhs: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionDef {
    pub id: ConditionId,
    pub guard: Option<Clause>,
    pub clauses: Vec<Clause>,
    /// Interpretation rules applied to the printed form.
    pub notes: Vec<String>,
}

fn clause(text: &str, lhs: Expr, cmp: Comparison, rhs: Expr) -> Clause {
    Clause { text: text.to_string(), lhs, cmp, rhs }
}

fn gt(text: &str, lhs: Expr, rhs: Expr) -> Clause {
    clause(text, lhs, Comparison::Gt, rhs)
}

fn lt(text: &str, lhs: Expr, rhs: Expr) -> Clause {
    clause(text, lhs, Comparison::Lt, rhs)
}

fn s(sym: Symbol) -> Expr {
    Expr::Sym(sym)
}

fn k(x: f64) -> Expr {
    Expr::Const(x)
}

fn sub_chain(first: Symbol, rest: &[Symbol]) -> Expr {
    rest.iter().fold(s(first), |acc, &x| acc - s(x))
}

fn order(n: u8) -> Order {
    Order::try_from(n).expect("order 1..=3")
}

fn d(of: impl Into<Quantity>, wrt: impl Into<Quantity>, n: u8) -> Expr {
    Expr::deriv(of, wrt, order(n))
}

/// Derivative with respect to `Max(args...)`.
fn d_max(of: impl Into<Quantity>, args: &[Symbol], n: u8) -> Expr {
    Expr::Deriv(Derivative {
        of: Differentiand::Quantity(of.into()),
        wrt: Differentiator::MaxOf(args.to_vec()),
        order: order(n),
    })
}

fn d_joint(a: Symbol, b: Symbol, wrt: impl Into<Quantity>, n: u8) -> Expr {
    Expr::Deriv(Derivative { of: Differentiand::Joint(a, b), wrt: Differentiator::Quantity(wrt.into()), order: order(n) })
}

fn max2(a: Expr, b: Expr) -> Expr {
    Expr::Max(vec![a, b])
}

fn min2(a: Expr, b: Expr) -> Expr {
    Expr::Min(vec![a, b])
}

fn under_max(e: Expr) -> Expr {
    Expr::under(StateSelector::all(), e)
}

fn under(state: State, e: Expr) -> Expr {
    Expr::under(StateSelector::Fixed(state), e)
}

fn cp() -> Expr {
    s(Symbol::C) * s(Symbol::P)
}

/// Definition of `id` under the interpretation switches in `cfg`.
pub fn definition(id: ConditionId, cfg: &EvalConfig) -> ConditionDef {
    let mut def = ConditionDef { id, guard: None, clauses: Vec::new(), notes: Vec::new() };
    match id.set {
        ConditionSet::Buyer => buyer(id.index, cfg, &mut def),
        ConditionSet::BrokerWeb => broker_web(id.index, &mut def),
        ConditionSet::Seller => seller(id.index, cfg, &mut def),
    }
    def
}

fn buyer(index: u8, cfg: &EvalConfig, def: &mut ConditionDef) {
    use Symbol::*;
    let bu = Composite::BuyerUtility;
    let psi_max = [PsiBi, PsiB];
    match index {
        1 => {
            let g = gt("U_iw > U_ip", s(Uiw), s(Uip));
            match cfg.b1_mode {
                B1Mode::Guard => def.guard = Some(g),
                B1Mode::Joint => {
                    def.clauses.push(g);
                    def.notes.push("guard (U_iw > U_ip) read as a joint requirement".into());
                }
            }
            def.clauses.push(gt("I_i > I_p", s(Ii), s(Ip)));
            def.clauses.push(gt("I_i + I_o > I_p", s(Ii) + s(Io), s(Ip)));
        }
        2 => def.clauses.push(clause("I_i ≈ psi_b", s(Ii), Comparison::Approx, s(PsiB))),
        3 => {
            def.guard = Some(clause("P_s ≈ P_b | Max(E_m, E_p, E_s)", under_max(s(Ps)), Comparison::Approx, under_max(s(Pb))));
            def.clauses.push(gt(
                "[cP + psi_b + pi_b] | Max(E_m, E_p, E_s) > psi_bi + pi_i + U_iw",
                under_max(cp() + s(PsiB) + s(PiB)),
                s(PsiBi) + s(PiI) + s(Uiw),
            ));
            def.notes.push("left side and guard evaluated under the maximising state's overlay".into());
        }
        4 => {
            def.guard = Some(gt("U_iw > U_ip | Max(E_m, E_p, E_s)", under_max(s(Uiw)), under_max(s(Uip))));
            def.clauses.push(gt(
                "[cP + psi_b + pi_b] | Max(E_m, E_p, E_s) > psi_bi + pi_i + U_iw",
                under_max(cp() + s(PsiB) + s(PiB)),
                s(PsiBi) + s(PiI) + s(Uiw),
            ));
            def.notes.push("left side and guard evaluated under the maximising state's overlay".into());
        }
        5 => {
            def.clauses.push(gt("psi_b > psi_bi", s(PsiB), s(PsiBi)));
            def.clauses.push(gt("U_iw > U_ip", s(Uiw), s(Uip)));
        }
        6 => {
            def.clauses.push(lt("d2 psi_b/dU_ip2 < Min[d2 psi_bi/dU_iw2, 1]", d(PsiB, Uip, 2), min2(d(PsiBi, Uiw, 2), k(1.0))));
            def.clauses.push(lt("d psi_b/dU_ip < Min[d psi_bi/dU_iw, 1]", d(PsiB, Uip, 1), min2(d(PsiBi, Uiw, 1), k(1.0))));
        }
        7 => {
            def.clauses.push(gt("dU_iw/dpi_i > Min[dU_ip/dpi_b, 0]", d(Uiw, PiI, 1), min2(d(Uip, PiB, 1), k(0.0))));
            def.clauses.push(gt("d2U_iw/dpi_i2 > Min[d2U_ip/dpi_b2, 0]", d(Uiw, PiI, 2), min2(d(Uip, PiB, 2), k(0.0))));
        }
        8 => {
            def.clauses.push(gt("d2I_o/dpsi_bi2 > Max[d2(I_p + I_i)/dpsi_b2, 1]", d(Io, PsiBi, 2), max2(d(I, PsiB, 2), k(1.0))));
            def.clauses.push(gt("dI_o/dpsi_bi > Max[d(I_p + I_i)/dpsi_b, 1]", d(Io, PsiBi, 1), max2(d(I, PsiB, 1), k(1.0))));
        }
        9 => {
            def.clauses.push(lt(
                "d(I_p + I_i)/dMax(E_m, E_p, E_s) < 1",
                Expr::Deriv(Derivative {
                    of: Differentiand::Quantity(I.into()),
                    wrt: Differentiator::MaxState(State::ALL.to_vec()),
                    order: Order::First,
                }),
                k(1.0),
            ));
            def.notes.push("derivative taken with respect to the maximising state's value".into());
        }
        10 => {
            def.clauses.push(lt("d(I_p + I_i)/d(U_ip + U_iw) < Min[dI_o/dU_a, 1]", d(I, bu, 1), min2(d(Io, Ua, 1), k(1.0))));
            def.clauses.push(lt("d2(I_p + I_i)/d(U_ip + U_iw)2 < Min[d2I_o/dU_a2, 1]", d(I, bu, 2), min2(d(Io, Ua, 2), k(1.0))));
        }
        11 => {
            def.clauses.push(lt("d3(I_p + I_i)/d(U_ip + U_iw)3 < 1", d(I, bu, 3), k(1.0)));
            def.clauses.push(lt("d3I_o/dU_a3 < 1", d(Io, Ua, 3), k(1.0)));
        }
        12 => {
            def.clauses.push(gt("d3P_b/dP3 > Max[d3I_o/d(I_p + I_i)3, 1]", d(Pb, P, 3), max2(d(Io, I, 3), k(1.0))));
            def.clauses.push(gt("dP_b/dP > Max[dI_o/d(I_p + I_i), 1]", d(Pb, P, 1), max2(d(Io, I, 1), k(1.0))));
        }
        13 => {
            def.clauses.push(lt("u_hat_s < cP + pi_sb + I_p + I_i", s(UHatS), cp() + s(PiSb) + s(Ip) + s(Ii)));
            def.notes.push("the printed accented u_s is read as u_hat_s".into());
        }
        14 => {
            def.clauses.push(lt("du_hat_s/d(pi_sb + I_p + I_i) < 1", d(UHatS, Composite::ClosingPlusInfo, 1), k(1.0)));
            def.notes.push("the printed accented u_s is read as u_hat_s".into());
        }
        15 => def.clauses.push(gt(
            "SC_b - psi_bi - psi_b > U_ip + U_iw + I_p + I_i + pi_b",
            sub_chain(ScB, &[PsiBi, PsiB]),
            s(Uip) + s(Uiw) + s(Ip) + s(Ii) + s(PiB),
        )),
        16 => {
            def.clauses.push(gt(
                "dSC_b/dMax(psi_bi, psi_b) > Max[1, d(U_ip + U_iw)/d(I_p + I_i + pi_b)]",
                d_max(ScB, &psi_max, 1),
                max2(k(1.0), d(bu, Composite::InfoPlusClosing, 1)),
            ));
            def.notes.push(max_driver_note());
        }
        17 => {
            def.clauses.push(gt(
                "d2SC_b/dMax(psi_bi, psi_b)2 > Max[0, d2(U_ip + U_iw)/d(I_p + I_i + pi_b)2]",
                d_max(ScB, &psi_max, 2),
                max2(k(0.0), d(bu, Composite::InfoPlusClosing, 2)),
            ));
            def.notes.push(max_driver_note());
        }
        18 => {
            def.clauses.push(gt(
                "dSC_b/dMax(psi_bi, psi_b) > Max[1, d(rho_i ∩ rho_p)/d(U_ip + U_iw)]",
                d_max(ScB, &psi_max, 1),
                max2(k(1.0), d_joint(RhoI, RhoP, bu, 1)),
            ));
            def.notes.push(max_driver_note());
            def.notes.push(joint_note(cfg));
        }
        19 => {
            def.clauses.push(gt(
                "d2SC_b/dMax(psi_bi, psi_b)2 > Max[0, d2(rho_i ∩ rho_p)/d(U_ip + U_iw)2]",
                d_max(ScB, &psi_max, 2),
                max2(k(0.0), d_joint(RhoI, RhoP, bu, 2)),
            ));
            def.notes.push(max_driver_note());
            def.notes.push(joint_note(cfg));
        }
        _ => unreachable!("buyer condition index {index}"),
    }
}

fn broker_web(index: u8, def: &mut ConditionDef) {
    use Symbol::*;
    match index {
        1 => {
            def.guard = Some(gt("psi_b > psi_bi | E_p", under(State::Ep, s(PsiB)), under(State::Ep, s(PsiBi))));
            def.clauses.push(lt(
                "[cP * rho_p] - B_b - B_s < B_i | E_p",
                under(State::Ep, cp() * s(RhoP) - s(Bb) - s(Bs)),
                under(State::Ep, s(Bi)),
            ));
            def.notes.push("whole condition evaluated under the E_p overlay".into());
        }
        2 => {
            let sel = StateSelector::ArgMax(vec![State::Es, State::Ep]);
            def.clauses.push(lt(
                "U_ip < U_iw | Max(E_s, E_p)",
                Expr::under(sel.clone(), s(Uip)),
                Expr::under(sel, s(Uiw)),
            ));
        }
        3 => def.clauses.push(gt("psi_bi * rho_i > cP * rho_p", s(PsiBi) * s(RhoI), cp() * s(RhoP))),
        4 => def.clauses.push(clause("drho_i/drho_p ≈ 0", d(RhoI, RhoP, 1), Comparison::ApproxZero, k(0.0))),
        5 => {
            let b = Composite::BrokerCost;
            def.clauses.push(clause("drho_i/dB ≈ 0", d(RhoI, b, 1), Comparison::ApproxZero, k(0.0)));
            def.clauses.push(clause("drho_p/dB ≈ 0", d(RhoP, b, 1), Comparison::ApproxZero, k(0.0)));
            def.notes.push("B read as B_b + B_s + B_i + B_n".into());
        }
        6 => {
            def.clauses.push(lt(
                "dB_i/dI_i < d(RC_br + SC_br)/dI_i",
                d(Bi, Ii, 1),
                d(Composite::BrokerCapital, Ii, 1),
            ));
            def.notes.push("differentials taken with respect to I_i (not printed)".into());
        }
        7 => def.clauses.push(gt("d(RC_br + SC_br)/dB_i > 1", d(Composite::BrokerCapital, Bi, 1), k(1.0))),
        _ => unreachable!("broker web condition index {index}"),
    }
}

fn seller(index: u8, cfg: &EvalConfig, def: &mut ConditionDef) {
    use Symbol::*;
    let su = Composite::SellerUtility;
    let ua = if cfg.seller_uses_u_sa { Usa } else { Ua };
    let ua_note = || {
        if cfg.seller_uses_u_sa {
            "U_a replaced by the seller analogue U_sa".to_string()
        } else {
            "U_a (defined for the buyer) used as printed".to_string()
        }
    };
    let psi_max = [PsiSi, PsiS];
    let brokered = Composite::SellerBrokeredCost;
    let direct = Composite::SellerDirectCost;
    match index {
        1 => {
            def.clauses.push(gt("rho_s > rho_p ∩ rho_i", s(RhoS), Expr::Joint(Box::new(s(RhoP)), Box::new(s(RhoI)))));
            def.clauses.push(gt("rho_s > rho_p", s(RhoS), s(RhoP)));
            def.clauses.push(gt("rho_s > rho_i", s(RhoS), s(RhoI)));
            def.notes.push(joint_note(cfg));
        }
        2 => {
            let po = Composite::PersonalPlusOther;
            def.clauses.push(gt("dI_o/dpsi_si > Max[d(I_p + I_o)/dpsi_sb, 1]", d(Io, PsiSi, 1), max2(d(po, PsiSb, 1), k(1.0))));
            def.clauses.push(gt("d3I_o/dpsi_si3 > Max[d3(I_p + I_o)/dpsi_sb3, 1]", d(Io, PsiSi, 3), max2(d(po, PsiSb, 3), k(1.0))));
            def.notes.push("I_p + I_o implemented as printed".into());
        }
        3 => {
            def.clauses.push(gt(
                "dU_a/dpsi_si > Max[d(U_sp + U_sw)/dpsi_s, 1]",
                d(ua, PsiSi, 1),
                max2(d(su, PsiS, 1), k(1.0)),
            ));
            def.clauses.push(gt(
                "d3U_a/dpsi_si3 > Max[d3(U_sp + U_sw)/dpsi_s3, 1]",
                d(ua, PsiSi, 3),
                max2(d(su, PsiS, 3), k(1.0)),
            ));
            def.notes.push("bracket [x, 1] read as Max[x, 1]".into());
            def.notes.push(ua_note());
        }
        4 => {
            def.clauses.push(gt("psi_s > psi_si", s(PsiS), s(PsiSi)));
            def.clauses.push(gt("psi_s | Max(E) > psi_si | Max(E)", under_max(s(PsiS)), under_max(s(PsiSi))));
        }
        5 => {
            def.clauses.push(gt("I_o > I_i + I_p", s(Io), s(Ii) + s(Ip)));
            def.clauses.push(gt("I_o | Max(E) > (I_i + I_p) | Max(E)", under_max(s(Io)), under_max(s(Ii) + s(Ip))));
        }
        6 => def.clauses.push(gt("dP_s/dP > 1", d(Ps, P, 1), k(1.0))),
        7 => {
            def.clauses.push(gt("dpi_sb/d(U_sp + U_sw) > dpi_s/dU_a", d(PiSb, su, 1), d(PiS, ua, 1)));
            def.clauses.push(gt("pi_sb > pi_s", s(PiSb), s(PiS)));
            def.notes.push(ua_note());
        }
        8 => {
            def.clauses.push(gt("dP/dpi_sb > Max[dP/dpi_s, 1]", d(P, PiSb, 1), max2(d(P, PiS, 1), k(1.0))));
            def.clauses.push(gt("dP_s/dpi_sb > Max[dP_s/dpi_s, 1]", d(Ps, PiSb, 1), max2(d(Ps, PiS, 1), k(1.0))));
            def.clauses.push(gt("dP_s/dP > 1", d(Ps, P, 1), k(1.0)));
            def.clauses.push(gt("dP/dc > 1", d(P, C, 1), k(1.0)));
            def.notes.push("fragments `dP > dpi_s` and `dP_s > dpi_s` read as dP/dpi_s and dP_s/dpi_s".into());
        }
        9 => {
            def.clauses.push(gt("psi_sb + pi_sb > psi_si + pi_s", s(PsiSb) + s(PiSb), s(PsiSi) + s(PiS)));
            def.clauses.push(gt("d(psi_sb + pi_sb)/dP_s > d(psi_si + pi_s)/dP_s", d(brokered, Ps, 1), d(direct, Ps, 1)));
        }
        10 => def.clauses.push(gt("d(psi_sb + pi_sb)/dc > d(psi_si + pi_s)/dc", d(brokered, C, 1), d(direct, C, 1))),
        11 => def.clauses.push(gt(
            "d(psi_sb + pi_sb)/dpi_sb > d(psi_si + pi_s)/dpi_sb",
            d(brokered, PiSb, 1),
            d(direct, PiSb, 1),
        )),
        12 => {
            def.clauses.push(gt("rho_s > rho_p", s(RhoS), s(RhoP)));
            def.clauses.push(gt("rho_s > rho_i", s(RhoS), s(RhoI)));
        }
        13 => {
            let own = s(RhoS) * sub_chain(Ps, &[PiB, PiS, PsiSi]);
            let physical = s(RhoP) * sub_chain(P, &[PiB, PiSb, PsiS]);
            let web = Expr::Joint(Box::new(s(RhoI)), Box::new(s(RhoP))) * sub_chain(P, &[PiB, PiSb, PsiSb]);
            def.clauses.push(gt(
                "∫rho_s(P_s - pi_b - pi_s - psi_si) > Max[∫rho_p(P - pi_b - pi_sb - psi_s), ∫(rho_i ∩ rho_p)(P - pi_b - pi_sb - psi_sb)]",
                Expr::Integral(Box::new(own)),
                max2(Expr::Integral(Box::new(physical)), Expr::Integral(Box::new(web))),
            ));
            def.notes.push(format!(
                "integrals over [0, {}] by the trapezoid rule with dt = {}",
                cfg.horizon.t, cfg.horizon.dt
            ));
            def.notes.push(joint_note(cfg));
        }
        14 => {
            def.clauses.push(gt(
                "SC_s - psi_si - pi_sb * pi_sb > U_sw + U_sp + I_p + I_i + pi_sb",
                s(ScS) - s(PsiSi) - s(PiSb) * s(PiSb),
                s(Usw) + s(Usp) + s(Ip) + s(Ii) + s(PiSb),
            ));
            def.notes.push("(pi_sb * pi_sb) implemented literally as pi_sb^2; likely a typographical artifact".into());
        }
        15 => {
            def.clauses.push(gt(
                "dSC_s/dMax(psi_si, psi_s) > Max[1, d(U_sp + U_sw)/d(I_p + I_i + pi_b)]",
                d_max(ScS, &psi_max, 1),
                max2(k(1.0), d(su, Composite::InfoPlusClosing, 1)),
            ));
            def.notes.push(max_driver_note());
        }
        16 => {
            def.clauses.push(gt(
                "d2SC_s/dMax(psi_si, psi_s)2 > Max[0, d2(U_sp + U_sw)/d(I_p + I_i + pi_b)2]",
                d_max(ScS, &psi_max, 2),
                max2(k(0.0), d(su, Composite::InfoPlusClosing, 2)),
            ));
            def.notes.push(max_driver_note());
        }
        17 => {
            def.clauses.push(gt(
                "dSC_s/dMax(psi_si, psi_s) > Max[1, d(rho_i ∩ rho_p)/d(U_sp + U_sw)]",
                d_max(ScS, &psi_max, 1),
                max2(k(1.0), d_joint(RhoI, RhoP, su, 1)),
            ));
            def.notes.push(max_driver_note());
            def.notes.push(joint_note(cfg));
        }
        18 => {
            def.clauses.push(gt(
                "d2SC_s/dMax(psi_si, psi_s)2 > Max[0, d2(rho_i ∩ rho_p)/d(U_sp + U_sw)2]",
                d_max(ScS, &psi_max, 2),
                max2(k(0.0), d_joint(RhoI, RhoP, su, 2)),
            ));
            def.notes.push(max_driver_note());
            def.notes.push(joint_note(cfg));
        }
        _ => unreachable!("seller condition index {index}"),
    }
}

fn max_driver_note() -> String {
    "derivative with respect to Max(x, y) taken against the larger argument".into()
}

fn joint_note(cfg: &EvalConfig) -> String {
    match cfg.intersection {
        crate::calculus::Intersection::Product => "probability intersection read as a product (independence)".into(),
        crate::calculus::Intersection::Min => "probability intersection read as a minimum (comonotone)".into(),
    }
}
