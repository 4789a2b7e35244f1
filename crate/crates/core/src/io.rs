//! Scenario files: a flat JSON object keyed by ASCII symbol names.
//!
//! [`save_scenario`] writes the canonical form (pretty-printed, fixed key
//! order, trailing newline); loading and saving a canonical file reproduces
//! it byte for byte.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calculus::response::{Context, PathKind, ResponseFunction, Shape, StateOverlay, TimePath};
use crate::scenario::{
    validate_scenario, BrokerCosts, BrokerEffortCapital, ClosingCosts, ClosingProbabilities, InformationBundle,
    ListingStates, PartySocialCapital, Scenario, SearchCosts, UtilityProfile, ValidationReport, Valuation, Violation,
    ViolationKind,
};
use crate::symbols::{Quantity, State, Symbol};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown field: {0}")]
    UnknownField(String),
    #[error("validation failed: {0}")]
    Validation(ValidationReport),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    label: String,
    #[serde(rename = "P")]
    p: f64,
    #[serde(rename = "P_b")]
    p_b: f64,
    #[serde(rename = "P_s")]
    p_s: f64,
    c: f64,
    #[serde(rename = "B_b")]
    b_b: f64,
    #[serde(rename = "B_n")]
    b_n: f64,
    #[serde(rename = "B_op")]
    b_op: f64,
    #[serde(rename = "B_s")]
    b_s: f64,
    #[serde(rename = "B_i")]
    b_i: f64,
    #[serde(rename = "B_it")]
    b_it: f64,
    prospect_count: u32,
    #[serde(rename = "I")]
    i: f64,
    #[serde(rename = "I_p")]
    i_p: f64,
    #[serde(rename = "I_i")]
    i_i: f64,
    #[serde(rename = "I_o")]
    i_o: f64,
    psi_b: f64,
    psi_bi: f64,
    psi_s: f64,
    psi_si: f64,
    psi_sb: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    valued_time_share: Option<f64>,
    #[serde(rename = "U_ip")]
    u_ip: f64,
    #[serde(rename = "U_iw")]
    u_iw: f64,
    #[serde(rename = "U_a")]
    u_a: f64,
    #[serde(rename = "U_sp")]
    u_sp: f64,
    #[serde(rename = "U_sw")]
    u_sw: f64,
    #[serde(rename = "U_sa")]
    u_sa: f64,
    pi_b: f64,
    pi_i: f64,
    pi_sb: f64,
    pi_s: f64,
    #[serde(rename = "E_s")]
    e_s: f64,
    #[serde(rename = "E_p")]
    e_p: f64,
    #[serde(rename = "E_m")]
    e_m: f64,
    rho_p: f64,
    rho_i: f64,
    rho_s: f64,
    u_hat: f64,
    u_hat_s: f64,
    #[serde(rename = "RC_br")]
    rc_br: f64,
    #[serde(rename = "SC_br")]
    sc_br: f64,
    #[serde(rename = "SC_s")]
    sc_s: f64,
    #[serde(rename = "SC_b")]
    sc_b: f64,
    #[serde(default)]
    overlays: Vec<OverlayFile>,
    #[serde(default)]
    responses: Vec<ResponseFile>,
    #[serde(default)]
    time_paths: Vec<PathFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverlayFile {
    state: State,
    overrides: BTreeMap<String, f64>,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn base_context() -> String {
    "base".into()
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ResponseFile {
    Polynomial {
        driven: String,
        driver: String,
        coeffs: Vec<f64>,
        #[serde(default, skip_serializing_if = "is_zero")]
        center: f64,
        #[serde(default = "base_context")]
        context: String,
    },
    PiecewiseLinear {
        driven: String,
        driver: String,
        knots: Vec<[f64; 2]>,
        #[serde(default = "base_context")]
        context: String,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum PathFile {
    Constant { symbol: String, value: f64 },
    Linear { symbol: String, intercept: f64, slope: f64 },
    Samples { symbol: String, times: Vec<f64>, values: Vec<Option<f64>> },
}

/// Collects names that do not resolve while converting a file.
#[derive(Default)]
struct Names(Vec<Violation>);

impl Names {
    fn unknown(&mut self, name: &str, where_: &str) {
        self.0.push(Violation {
            kind: ViolationKind::UnknownSymbol,
            subject: name.to_string(),
            message: format!("`{name}` in {where_} is not a declared symbol"),
        });
    }

    fn symbol(&mut self, name: &str, where_: &str) -> Option<Symbol> {
        name.parse().map_err(|_| self.unknown(name, where_)).ok()
    }

    fn quantity(&mut self, name: &str, where_: &str) -> Option<Quantity> {
        name.parse().map_err(|_| self.unknown(name, where_)).ok()
    }

    fn context(&mut self, name: &str, where_: &str) -> Option<Context> {
        if name == "base" {
            return Some(Context::Base);
        }
        name.parse::<State>().map(Context::State).map_err(|_| self.unknown(name, where_)).ok()
    }
}

impl ScenarioFile {
    fn into_scenario(self) -> Result<Scenario, ValidationReport> {
        let mut names = Names::default();

        let mut overlays = BTreeMap::new();
        for ov in self.overlays {
            let mut overlay = StateOverlay::new(ov.state);
            for (name, v) in ov.overrides {
                if let Some(sym) = names.symbol(&name, &format!("overlay {}", ov.state)) {
                    overlay.overrides.insert(sym, v);
                }
            }
            if overlays.insert(ov.state, overlay).is_some() {
                names.0.push(Violation {
                    kind: ViolationKind::OverlayStateMismatch,
                    subject: ov.state.name().to_string(),
                    message: "state has more than one overlay".into(),
                });
            }
        }

        let mut responses = Vec::new();
        for r in self.responses {
            let (driven, driver, context, shape) = match r {
                ResponseFile::Polynomial { driven, driver, coeffs, center, context } => {
                    (driven, driver, context, Shape::Polynomial { coeffs, center })
                }
                ResponseFile::PiecewiseLinear { driven, driver, knots, context } => {
                    (driven, driver, context, Shape::PiecewiseLinear { knots: knots.iter().map(|k| (k[0], k[1])).collect() })
                }
            };
            let where_ = format!("response {driven}({driver})");
            let (a, b, c) = (names.quantity(&driven, &where_), names.quantity(&driver, &where_), names.context(&context, &where_));
            if let (Some(driven), Some(driver), Some(context)) = (a, b, c) {
                responses.push(ResponseFunction { driven, driver, shape, context });
            }
        }

        let mut time_paths = Vec::new();
        for p in self.time_paths {
            let (symbol, kind) = match p {
                PathFile::Constant { symbol, value } => (symbol, PathKind::Constant { value }),
                PathFile::Linear { symbol, intercept, slope } => (symbol, PathKind::Linear { intercept, slope }),
                PathFile::Samples { symbol, times, values } => (symbol, PathKind::Samples { times, values }),
            };
            if let Some(symbol) = names.symbol(&symbol, "time path") {
                time_paths.push(TimePath { symbol, kind });
            }
        }

        if !names.0.is_empty() {
            return Err(ValidationReport::from_violations(names.0));
        }

        Ok(Scenario {
            label: self.label,
            valuation: Valuation { p: self.p, p_b: self.p_b, p_s: self.p_s, c: self.c },
            broker_costs: BrokerCosts {
                b_b: self.b_b,
                b_n: self.b_n,
                b_op: self.b_op,
                b_s: self.b_s,
                b_i: self.b_i,
                b_it: self.b_it,
                prospect_count: self.prospect_count,
            },
            info: InformationBundle { i: self.i, i_p: self.i_p, i_i: self.i_i, i_o: self.i_o },
            search: SearchCosts {
                psi_b: self.psi_b,
                psi_bi: self.psi_bi,
                psi_s: self.psi_s,
                psi_si: self.psi_si,
                psi_sb: self.psi_sb,
                valued_time_share: self.valued_time_share,
            },
            utility: UtilityProfile {
                u_ip: self.u_ip,
                u_iw: self.u_iw,
                u_a: self.u_a,
                u_sp: self.u_sp,
                u_sw: self.u_sw,
                u_sa: self.u_sa,
            },
            closing: ClosingCosts { pi_b: self.pi_b, pi_i: self.pi_i, pi_sb: self.pi_sb, pi_s: self.pi_s },
            states: ListingStates { e_s: self.e_s, e_p: self.e_p, e_m: self.e_m, overlays },
            probs: ClosingProbabilities { rho_p: self.rho_p, rho_i: self.rho_i, rho_s: self.rho_s },
            effort: BrokerEffortCapital { u_hat: self.u_hat, u_hat_s: self.u_hat_s, rc_br: self.rc_br, sc_br: self.sc_br },
            social: PartySocialCapital { sc_s: self.sc_s, sc_b: self.sc_b },
            responses,
            time_paths,
        })
    }

    fn from_scenario(s: &Scenario) -> Self {
        ScenarioFile {
            label: s.label.clone(),
            p: s.valuation.p,
            p_b: s.valuation.p_b,
            p_s: s.valuation.p_s,
            c: s.valuation.c,
            b_b: s.broker_costs.b_b,
            b_n: s.broker_costs.b_n,
            b_op: s.broker_costs.b_op,
            b_s: s.broker_costs.b_s,
            b_i: s.broker_costs.b_i,
            b_it: s.broker_costs.b_it,
            prospect_count: s.broker_costs.prospect_count,
            i: s.info.i,
            i_p: s.info.i_p,
            i_i: s.info.i_i,
            i_o: s.info.i_o,
            psi_b: s.search.psi_b,
            psi_bi: s.search.psi_bi,
            psi_s: s.search.psi_s,
            psi_si: s.search.psi_si,
            psi_sb: s.search.psi_sb,
            valued_time_share: s.search.valued_time_share,
            u_ip: s.utility.u_ip,
            u_iw: s.utility.u_iw,
            u_a: s.utility.u_a,
            u_sp: s.utility.u_sp,
            u_sw: s.utility.u_sw,
            u_sa: s.utility.u_sa,
            pi_b: s.closing.pi_b,
            pi_i: s.closing.pi_i,
            pi_sb: s.closing.pi_sb,
            pi_s: s.closing.pi_s,
            e_s: s.states.e_s,
            e_p: s.states.e_p,
            e_m: s.states.e_m,
            rho_p: s.probs.rho_p,
            rho_i: s.probs.rho_i,
            rho_s: s.probs.rho_s,
            u_hat: s.effort.u_hat,
            u_hat_s: s.effort.u_hat_s,
            rc_br: s.effort.rc_br,
            sc_br: s.effort.sc_br,
            sc_s: s.social.sc_s,
            sc_b: s.social.sc_b,
            overlays: s
                .states
                .overlays
                .values()
                .map(|ov| OverlayFile {
                    state: ov.state,
                    overrides: ov.overrides.iter().map(|(k, v)| (k.name().to_string(), *v)).collect(),
                })
                .collect(),
            responses: s
                .responses
                .iter()
                .map(|r| {
                    let (driven, driver, context) = (r.driven.name().to_string(), r.driver.name().to_string(), r.context.name().to_string());
                    match &r.shape {
                        Shape::Polynomial { coeffs, center } => {
                            ResponseFile::Polynomial { driven, driver, coeffs: coeffs.clone(), center: *center, context }
                        }
                        Shape::PiecewiseLinear { knots } => ResponseFile::PiecewiseLinear {
                            driven,
                            driver,
                            knots: knots.iter().map(|&(x, y)| [x, y]).collect(),
                            context,
                        },
                    }
                })
                .collect(),
            time_paths: s
                .time_paths
                .iter()
                .map(|p| {
                    let symbol = p.symbol.name().to_string();
                    match &p.kind {
                        PathKind::Constant { value } => PathFile::Constant { symbol, value: *value },
                        PathKind::Linear { intercept, slope } => PathFile::Linear { symbol, intercept: *intercept, slope: *slope },
                        PathKind::Samples { times, values } => {
                            PathFile::Samples { symbol, times: times.clone(), values: values.clone() }
                        }
                    }
                })
                .collect(),
        }
    }
}

fn map_serde_error(e: serde_json::Error) -> ScenarioError {
    let msg = e.to_string();
    if msg.starts_with("unknown field") {
        ScenarioError::UnknownField(msg)
    } else {
        ScenarioError::Parse(msg)
    }
}

/// Parse a scenario without running [`validate_scenario`]. Names that do not
/// resolve are still reported as a validation failure.
pub fn parse_scenario(json: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(json).map_err(map_serde_error)?;
    file.into_scenario().map_err(ScenarioError::Validation)
}

/// Parse and validate.
pub fn scenario_from_json(json: &str) -> Result<Scenario, ScenarioError> {
    let s = parse_scenario(json)?;
    let report = validate_scenario(&s);
    if report.ok {
        Ok(s)
    } else {
        Err(ScenarioError::Validation(report))
    }
}

/// Canonical JSON text of `s`, newline-terminated.
pub fn scenario_to_json(s: &Scenario) -> String {
    let mut out = serde_json::to_string_pretty(&ScenarioFile::from_scenario(s)).expect("scenario serializes");
    out.push('\n');
    out
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    scenario_from_json(&text)
}

pub fn save_scenario(s: &Scenario, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    std::fs::write(path, scenario_to_json(s)).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })
}
