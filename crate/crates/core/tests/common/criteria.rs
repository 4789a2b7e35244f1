//! The eight acceptance checks. Each returns whether it passed plus a one-line
//! summary; the acceptance runner prints them and the focused test files
//! assert on them.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dismed_core::calculus::{finite_difference, Context, Order, ResponseFunction, Step, TimePath};
use dismed_core::conditions::{decide, eval_condition, eval_condition_set, Aggregate, ConditionId, ConditionSet, Status};
use dismed_core::config::{EvalConfig, OptimizerConfig};
use dismed_core::optimizer::{max_capital_within, optimize_broker, pareto_sweep, Bounds};
use dismed_core::scenario::Scenario;
use dismed_core::sim::{run_sweep, DistributionSpec, Marginal, SweepStats};
use dismed_core::symbols::Symbol;

use super::fixtures::{self, PERTURBATIONS};
use super::oracle::{oracle, oracle_set, O, IDS};
use super::to_o;
use super::world::{declare_all, horner, random_bare, random_full, World, RESPONSE_PAIRS};

pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check { pass, detail: detail.into() }
    }
}

// 1. oracle equivalence

pub fn oracle_equivalence(scenarios: u64) -> Check {
    let cfg = EvalConfig::default();
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for seed in 0..scenarios {
        let w = random_full(seed);
        let s = w.scenario();
        for id in ConditionId::all() {
            let name = id.to_string();
            let got = to_o(eval_condition(&s, id, &cfg).status);
            let want = oracle(&w, &name);
            if got != want {
                mismatches.push(format!("seed {seed} {name}: engine {got:?}, oracle {want:?}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let total = scenarios as usize * IDS.len();
    Check::new(
        mismatches.is_empty() && secs < 60.0,
        format!(
            "{}/{total} verdicts agree over {scenarios} scenarios in {secs:.1}s{}",
            total - mismatches.len(),
            mismatches.first().map(|m| format!("; first mismatch {m}")).unwrap_or_default()
        ),
    )
}

// 2. fixture suite

fn statuses(w: &World) -> BTreeMap<String, Status> {
    let d = decide(&w.scenario(), &EvalConfig::default());
    d.reports().iter().flat_map(|r| r.verdicts.iter().map(|v| (v.id.to_string(), v.status))).collect()
}

pub fn fixture_suite() -> Check {
    let mut problems = Vec::new();
    let cases = [
        (fixtures::all_satisfied_buyer(), ConditionSet::Buyer, 'B'),
        (fixtures::all_satisfied_broker_web(), ConditionSet::BrokerWeb, 'W'),
        (fixtures::all_satisfied_seller(), ConditionSet::Seller, 'S'),
    ];
    for (w, set, prefix) in &cases {
        let r = eval_condition_set(&w.scenario(), *set, &EvalConfig::default());
        for (v, (id, o)) in r.verdicts.iter().zip(oracle_set(w, *prefix)) {
            if o != O::Sat || to_o(v.status) != o {
                problems.push(format!("{} {id}: engine {:?}, oracle {o:?}", w.label, v.status));
            }
        }
        if r.aggregate != Aggregate::Satisfied {
            problems.push(format!("{} aggregate {:?}", w.label, r.aggregate));
        }
    }
    let base = fixtures::all_three_satisfied();
    let before = statuses(&base);
    for (change, targets) in PERTURBATIONS {
        let mut w = base.clone();
        change.apply(&mut w);
        let after = statuses(&w);
        let mut flipped: Vec<&str> =
            after.iter().filter(|(id, s)| before[*id] != **s).map(|(id, _)| id.as_str()).collect();
        let mut want = targets.to_vec();
        flipped.sort();
        want.sort();
        if flipped != want || targets.iter().any(|id| after[*id] != Status::Violated) {
            problems.push(format!("{change:?}: flipped {flipped:?}, expected {want:?}"));
        }
        for id in IDS {
            if to_o(after[id]) != oracle(&w, id) {
                problems.push(format!("{change:?} {id}: engine disagrees with oracle"));
            }
        }
    }
    Check::new(
        problems.is_empty(),
        format!(
            "3 fixtures Satisfied condition-by-condition, {} perturbations flip exactly their targets{}",
            PERTURBATIONS.len(),
            problems.first().map(|p| format!("; {} problems, first {p}", problems.len())).unwrap_or_default()
        ),
    )
}

// 3. finite differences

/// Analytic `order`-th derivative of `sum a_k x^k` at `x`.
pub fn poly_derivative(coeffs: &[f64], x: f64, order: usize) -> f64 {
    let mut total = 0.0;
    for (k, a) in coeffs.iter().enumerate().skip(order) {
        let falling: f64 = (0..order).map(|j| (k - j) as f64).product();
        total += a * falling * x.powi((k - order) as i32);
    }
    total
}

/// Worst scaled error per order over `count` random polynomials of degree 1-6.
pub fn fd_errors(count: u64, seed: u64) -> [f64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 3];
    for _ in 0..count {
        let degree = rng.random_range(1..=6);
        let coeffs: Vec<f64> = (0..=degree).map(|_| rng.random_range(-3.0..3.0)).collect();
        let x0 = rng.random_range(-4.0..4.0);
        let mut s = Scenario::neutral("fd");
        s.set(Symbol::Bi, x0);
        s.responses.push(ResponseFunction::polynomial(Symbol::RcBr, Symbol::Bi, coeffs.clone()));
        for (k, order) in [Order::First, Order::Second, Order::Third].into_iter().enumerate() {
            let got = finite_difference(&s, Symbol::RcBr.into(), Symbol::Bi.into(), order, Step::default(), Context::Base)
                .as_point()
                .expect("declared response gives a point");
            let exact = poly_derivative(&coeffs, x0, k + 1);
            worst[k] = worst[k].max((got - exact).abs() / exact.abs().max(1.0));
        }
    }
    worst
}

pub fn fd_accuracy() -> Check {
    let worst = fd_errors(100, 3);
    let pass = worst[0] <= 1e-4 && worst[1] <= 1e-4 && worst[2] <= 1e-3;
    Check::new(
        pass,
        format!(
            "worst scaled error over 100 polynomials: order 1 {:.1e}, order 2 {:.1e}, order 3 {:.1e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

// 4. optimizer vs grid

/// A two-field instance: `RC_br` responds to one field and `SC_br` to another.
#[derive(Debug, Clone)]
pub struct TwoField {
    pub fields: [usize; 2],
    pub coeffs: [Vec<f64>; 2],
    pub hi: [f64; 2],
    pub commission: f64,
}

const FIELD_SYMBOLS: [Symbol; 4] = [Symbol::Bb, Symbol::Bs, Symbol::Bi, Symbol::Bn];

impl TwoField {
    pub fn random(rng: &mut ChaCha8Rng, concave: bool) -> Self {
        let mut idx = [0usize, 1, 2, 3];
        idx.shuffle(rng);
        let mut coeffs: [Vec<f64>; 2] = Default::default();
        for c in coeffs.iter_mut() {
            *c = if concave {
                vec![0.0, rng.random_range(1.0..6.0), -rng.random_range(0.2..2.0)]
            } else {
                let degree = rng.random_range(2..=4);
                (0..=degree).map(|k| if k == 0 { 0.0 } else { rng.random_range(-2.0..2.0) }).collect()
            };
        }
        let hi = [rng.random_range(1.0..5.0), rng.random_range(1.0..5.0)];
        // cP between 1 and 8 so the coverage constraint binds in some instances.
        let commission = rng.random_range(1.0..8.0);
        TwoField { fields: [idx[0], idx[1]], coeffs, hi, commission }
    }

    pub fn scenario(&self) -> Scenario {
        let mut s = Scenario::neutral("two-field");
        s.valuation.c = 0.1;
        s.valuation.p = self.commission / 0.1;
        s.responses.push(ResponseFunction::polynomial(Symbol::RcBr, FIELD_SYMBOLS[self.fields[0]], self.coeffs[0].clone()));
        s.responses.push(ResponseFunction::polynomial(Symbol::ScBr, FIELD_SYMBOLS[self.fields[1]], self.coeffs[1].clone()));
        s
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::default().with(self.fields[0], 0.0, self.hi[0]).with(self.fields[1], 0.0, self.hi[1])
    }

    /// Capital relative to the base point (every field at zero).
    pub fn capital(&self, a: f64, b: f64) -> f64 {
        horner(&self.coeffs[0], a) + horner(&self.coeffs[1], b)
    }

    pub fn feasible(&self, a: f64, b: f64) -> bool {
        let covered: f64 = [(self.fields[0], a), (self.fields[1], b)].iter().filter(|(f, _)| *f != 3).map(|(_, x)| x).sum();
        self.commission > covered.max(0.0)
    }

    /// Feasible grid points as (cost, capital).
    pub fn grid(&self, per_axis: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(per_axis * per_axis);
        for i in 0..per_axis {
            let a = self.hi[0] * i as f64 / (per_axis - 1) as f64;
            for j in 0..per_axis {
                let b = self.hi[1] * j as f64 / (per_axis - 1) as f64;
                if self.feasible(a, b) {
                    out.push((a + b, self.capital(a, b)));
                }
            }
        }
        out
    }
}

pub struct OptimizerSummary {
    pub within: usize,
    pub instances: usize,
    pub coverage_failures: usize,
    pub vertex_error: f64,
}

pub fn optimizer_summary(instances: u64) -> OptimizerSummary {
    let cfg = OptimizerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut within = 0;
    let mut coverage_failures = 0;
    for _ in 0..instances {
        let inst = TwoField::random(&mut rng, false);
        let s = inst.scenario();
        let r = optimize_broker(&s, &inst.bounds(), &cfg).unwrap();
        let grid_best = inst.grid(200).iter().map(|(c, k)| k - c).fold(f64::NEG_INFINITY, f64::max);
        if r.objective >= grid_best - 1e-3 * grid_best.abs() {
            within += 1;
        }
        if !r.feasible || !r.satisfies_coverage(&s) {
            coverage_failures += 1;
        }
    }
    // capital 5B_i - B_i^2 less cost B_i peaks at B_i = 2.
    let mut s = Scenario::neutral("vertex");
    s.valuation.p = 1000.0;
    s.responses.push(ResponseFunction::polynomial(Symbol::RcBr, Symbol::Bi, vec![0.0, 5.0, -1.0]));
    let r = optimize_broker(&s, &Bounds::default().with(2, 0.0, 4.0), &cfg).unwrap();
    if !r.satisfies_coverage(&s) {
        coverage_failures += 1;
    }
    OptimizerSummary { within, instances: instances as usize, coverage_failures, vertex_error: (r.decision.b_i - 2.0).abs() }
}

pub fn optimizer_correctness() -> Check {
    let o = optimizer_summary(100);
    Check::new(
        o.within >= 95 && o.vertex_error <= 1e-4 && o.coverage_failures == 0,
        format!(
            "{}/{} instances within 1e-3 of the 200x200 grid; vertex error {:.1e}; {} coverage failures",
            o.within, o.instances, o.vertex_error, o.coverage_failures
        ),
    )
}

// 5. Pareto soundness

/// Non-dominated subset of (cost, capital) pairs: lower cost, higher capital.
pub fn nondominated(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for p in sorted {
        if out.last().is_none_or(|q| p.1 > q.1) {
            out.push(p);
        }
    }
    out
}

/// Worst objective-space gap between the ε-constraint frontier and the grid's
/// non-dominated set, plus the number of dominated pairs in the frontier.
pub fn pareto_gap(inst: &TwoField, k: usize) -> (f64, usize) {
    let cfg = OptimizerConfig::default();
    let s = inst.scenario();
    let bounds = inst.bounds();
    let frontier = pareto_sweep(&s, &bounds, k, &cfg).unwrap();
    let mut dominated = 0;
    for p in &frontier {
        dominated += frontier.iter().filter(|q| q.dominates(p)).count();
    }
    let grid = nondominated(&inst.grid(200));
    let mut gap = 0.0f64;
    // No grid point may beat a frontier point.
    for p in &frontier {
        let best = grid.iter().filter(|q| q.0 <= p.cost).map(|q| q.1).fold(f64::NEG_INFINITY, f64::max);
        gap = gap.max((best - p.capital) / best.abs().max(1.0));
    }
    // Every grid trade-off in the frontier's cost range is reached by the
    // ε-constraint solution at that budget.
    let (lo, hi) = (frontier.first().unwrap().cost, frontier.last().unwrap().cost);
    let inside: Vec<_> = grid.iter().filter(|q| q.0 >= lo && q.0 <= hi).collect();
    for q in inside.iter().step_by((inside.len() / 25).max(1)) {
        let p = max_capital_within(&s, &bounds, q.0, &cfg).unwrap().expect("budget above the cheapest point");
        gap = gap.max((q.1 - p.capital) / q.1.abs().max(1.0));
    }
    (gap, dominated)
}

pub fn pareto_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut dominated = 0;
    let count = 20;
    for _ in 0..count {
        let inst = TwoField::random(&mut rng, true);
        let (g, d) = pareto_gap(&inst, 10);
        worst = worst.max(g);
        dominated += d;
    }
    Check::new(
        worst <= 1e-3 && dominated == 0,
        format!("{count} convex instances: worst gap to grid frontier {worst:.1e}, {dominated} dominated frontier pairs"),
    )
}

// 6. sweep determinism and bounds

pub fn sweep_distribution() -> DistributionSpec {
    DistributionSpec::point_mass()
        .with(Symbol::PsiBi, Marginal::Uniform { lo: 1.5, hi: 5.0 })
        .with(Symbol::PsiSi, Marginal::Uniform { lo: 1.0, hi: 7.0 })
        .with(Symbol::RhoS, Marginal::Normal { mean: 0.92, sd: 0.05 })
        .with(Symbol::C, Marginal::Discrete { values: vec![0.03, 0.05, 0.08], weights: vec![1.0, 2.0, 1.0] })
}

pub fn sweep_json(s: &SweepStats) -> String {
    serde_json::to_string(s).unwrap()
}

/// Problems with rate bounds or conjunction ordering.
pub fn sweep_bound_problems(stats: &SweepStats) -> Vec<String> {
    let mut problems = Vec::new();
    let unit = |x: f64| (0.0..=1.0).contains(&x);
    for c in &stats.conditions {
        if !unit(c.frequency) || !unit(c.indeterminate_rate) {
            problems.push(format!("{} rate out of range", c.id));
        }
    }
    for r in &stats.sets {
        if ![r.satisfied_rate, r.not_satisfied_rate, r.indeterminate_rate].into_iter().all(unit) {
            problems.push(format!("{} rate out of range", r.set));
        }
        let min_member = stats.conditions.iter().filter(|c| c.id.set == r.set).map(|c| c.frequency).fold(1.0, f64::min);
        if r.satisfied_rate > min_member {
            problems.push(format!("{} aggregate {} above member minimum {min_member}", r.set, r.satisfied_rate));
        }
    }
    problems
}

pub fn sweep_determinism() -> Check {
    let base = fixtures::all_three_satisfied().scenario();
    let dist = sweep_distribution();
    let cfg = EvalConfig::default();
    let runs: Vec<String> = [Some(1), Some(1), Some(2), Some(4), None]
        .into_iter()
        .map(|workers| sweep_json(&run_sweep(&base, &dist, 400, 11, &cfg, workers).unwrap()))
        .collect();
    let identical = runs.iter().all(|r| *r == runs[0]);
    let stats: SweepStats = serde_json::from_str(&runs[0]).unwrap();
    let problems = sweep_bound_problems(&stats);
    Check::new(
        identical && problems.is_empty(),
        format!(
            "5 sweeps (n = 400, workers 1/1/2/4/default) {}; {} bound violations",
            if identical { "byte-identical" } else { "differ" },
            problems.len()
        ),
    )
}

// 7. monotone refinement

fn all_statuses(w: &World, cfg: &EvalConfig) -> Vec<Status> {
    let s = w.scenario();
    ConditionId::all().map(|id| eval_condition(&s, id, cfg).status).collect()
}

fn decided(s: Status) -> Option<bool> {
    match s {
        Status::Satisfied | Status::VacuouslySatisfied => Some(true),
        Status::Violated => Some(false),
        _ => None,
    }
}

/// Flips seen while adding responses one at a time to `count` bare scenarios,
/// and the number of Indeterminate verdicts that resolved along the way.
pub fn refinement_flips(count: u64) -> (Vec<String>, usize) {
    let cfg = EvalConfig::default();
    let mut flips = Vec::new();
    let mut resolved = 0;
    for seed in 0..count {
        let (mut w, mut rng) = random_bare(1000 + seed);
        let mut pairs = RESPONSE_PAIRS.to_vec();
        pairs.shuffle(&mut rng);
        let mut prev = all_statuses(&w, &cfg);
        for chunk in pairs.chunks(rng.random_range(1..=6)) {
            declare_all(&mut w, &mut rng, chunk);
            let now = all_statuses(&w, &cfg);
            for (k, (a, b)) in prev.iter().zip(&now).enumerate() {
                match (decided(*a), decided(*b)) {
                    (Some(x), Some(y)) if x != y => flips.push(format!("seed {seed} {}: {a:?} -> {b:?}", IDS[k])),
                    (Some(_), None) => flips.push(format!("seed {seed} {}: {a:?} -> {b:?}", IDS[k])),
                    (None, Some(_)) => resolved += 1,
                    _ => {}
                }
            }
            prev = now;
        }
    }
    (flips, resolved)
}

pub fn monotone_refinement() -> Check {
    let (flips, resolved) = refinement_flips(100);
    Check::new(
        flips.is_empty(),
        format!(
            "100 scenarios refined response by response: {} flips, {resolved} Indeterminate verdicts resolved{}",
            flips.len(),
            flips.first().map(|f| format!("; first {f}")).unwrap_or_default()
        ),
    )
}

// 8. S13 integral

/// S13's left side (`∫ rho_s (P_s - pi_b - pi_s - psi_si)`) as evaluated,
/// and its exact value, for a linear `P_s` path.
pub fn s13_lhs(intercept: f64, slope: f64, t: f64, dt: f64) -> (f64, f64) {
    let w = fixtures::all_satisfied_seller();
    let (rho_s, pi_b, pi_s, psi_si) = (w.base("rho_s"), w.base("pi_b"), w.base("pi_s"), w.base("psi_si"));
    let mut s = w.scenario();
    if slope != 0.0 {
        s.time_paths.push(TimePath::linear(Symbol::Ps, intercept, slope));
    } else {
        s.set(Symbol::Ps, intercept);
    }
    let mut cfg = EvalConfig::default();
    cfg.horizon.t = t;
    cfg.horizon.dt = dt;
    let id: ConditionId = "S13".parse().unwrap();
    let v = eval_condition(&s, id, &cfg);
    let got = v.clauses[0].lhs.as_point().expect("point-valued integral");
    let exact = rho_s * ((intercept - pi_b - pi_s - psi_si) * t + slope * t * t / 2.0);
    (got, exact)
}

pub fn integral_check() -> Check {
    let cases = [(100.0, 0.0, 1.0, 0.01), (100.0, 0.0, 10.0, 1.0), (80.0, 3.0, 10.0, 1.0), (100.0, -7.5, 2.0, 0.03), (60.0, 12.0, 1.0, 0.3)];
    let worst = cases
        .iter()
        .map(|&(a, b, t, dt)| {
            let (got, exact) = s13_lhs(a, b, t, dt);
            (got - exact).abs()
        })
        .fold(0.0f64, f64::max);
    Check::new(worst < 1e-9, format!("{} constant and linear integrands, worst absolute error {worst:.1e}", cases.len()))
}
