//! Derivative-free pattern search over the decision box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::OptimizerConfig;
use crate::scenario::Scenario;

use super::objective::{DecisionVector, Instance};
use super::{Bounds, OptError, OptResult, Resolved};

const INITIAL_STEP: f64 = 0.125;
const MIN_STEP: f64 = 1e-6;
const MAX_POLLS: usize = 200_000;

/// Lexicographic score: less constraint violation first, then a larger
/// primary, then a larger secondary value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Score {
    pub violation: f64,
    pub primary: f64,
    pub secondary: f64,
}

impl Score {
    pub(crate) fn better_than(&self, other: &Score) -> bool {
        if self.violation != other.violation {
            return self.violation < other.violation;
        }
        if self.primary != other.primary {
            return self.primary > other.primary;
        }
        self.secondary > other.secondary
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Local {
    pub state_index: usize,
    pub x: [f64; 4],
    pub score: Score,
    pub iterations: usize,
}

fn directions(free: &[usize], widths: &[f64; 4]) -> Vec<[f64; 4]> {
    let mut dirs = Vec::new();
    for &j in free {
        for sign in [1.0, -1.0] {
            let mut d = [0.0; 4];
            d[j] = sign * widths[j];
            dirs.push(d);
        }
    }
    // Exchange moves shift budget between two fields at constant total cost.
    for (a, &i) in free.iter().enumerate() {
        for &j in &free[a + 1..] {
            let w = widths[i].min(widths[j]);
            for sign in [1.0, -1.0] {
                let mut d = [0.0; 4];
                d[i] = sign * w;
                d[j] = -sign * w;
                dirs.push(d);
            }
        }
    }
    dirs
}

fn pattern_search<F: Fn(&[f64; 4]) -> Score>(
    lo: &[f64; 4],
    hi: &[f64; 4],
    free: &[usize],
    start: [f64; 4],
    score: &F,
) -> ([f64; 4], Score, usize) {
    let widths: [f64; 4] = std::array::from_fn(|j| hi[j] - lo[j]);
    let dirs = directions(free, &widths);
    let mut x = start;
    let mut best = score(&x);
    let mut step = INITIAL_STEP;
    let mut polls = 0;
    while step >= MIN_STEP && polls < MAX_POLLS {
        polls += 1;
        let mut next: Option<([f64; 4], Score)> = None;
        for d in &dirs {
            let cand: [f64; 4] = std::array::from_fn(|j| (x[j] + step * d[j]).clamp(lo[j], hi[j]));
            if cand == x {
                continue;
            }
            let sc = score(&cand);
            let incumbent = next.as_ref().map_or(&best, |(_, s)| s);
            if sc.better_than(incumbent) {
                next = Some((cand, sc));
            }
        }
        match next {
            Some((cand, sc)) => {
                x = cand;
                best = sc;
            }
            None => step /= 2.0,
        }
    }
    (x, best, polls)
}

/// Run the search from every start in every candidate state and keep the
/// best local result; ties go to the earliest (state, start) index, so the
/// outcome does not depend on thread scheduling.
pub(crate) fn solve<F>(
    instances: &[Instance<'_>],
    resolved: &Resolved,
    cfg: &OptimizerConfig,
    extra_starts: &[(usize, [f64; 4])],
    score: F,
) -> Local
where
    F: Fn(&Instance<'_>, &[f64; 4]) -> Score + Sync,
{
    let restarts = cfg.restarts.max(1);
    let mut jobs: Vec<(usize, [f64; 4])> = extra_starts.to_vec();
    for (si, inst) in instances.iter().enumerate() {
        let (lo, hi) = resolved.for_instance(inst);
        for r in 0..restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream((si * restarts + r) as u64);
            let start: [f64; 4] =
                std::array::from_fn(|j| if lo[j] < hi[j] { rng.random_range(lo[j]..=hi[j]) } else { lo[j] });
            jobs.push((si, start));
        }
    }
    let results: Vec<Local> = jobs
        .par_iter()
        .map(|&(si, start)| {
            let inst = &instances[si];
            let (lo, hi) = resolved.for_instance(inst);
            let (x, sc, it) = pattern_search(&lo, &hi, &resolved.free, start, &|x| score(inst, x));
            Local { state_index: si, x, score: sc, iterations: it }
        })
        .collect();
    let total: usize = results.iter().map(|l| l.iterations).sum();
    let mut best = results.into_iter().reduce(|a, b| if b.score.better_than(&a.score) { b } else { a }).expect("at least one start");
    best.iterations = total;
    best
}

pub(crate) fn instances<'a>(s: &'a Scenario, resolved: &Resolved) -> Result<Vec<Instance<'a>>, OptError> {
    resolved.states.iter().map(|&st| Instance::new(s, st)).collect()
}

/// Maximise the broker objective over the box by restarted pattern search.
/// An unsatisfiable constraint is reported through `feasible = false`.
pub fn optimize_broker(s: &Scenario, bounds: &Bounds, cfg: &OptimizerConfig) -> Result<OptResult, OptError> {
    let resolved = bounds.resolve(s)?;
    let insts = instances(s, &resolved)?;
    let best = solve(&insts, &resolved, cfg, &[], |inst, x| Score {
        violation: inst.violation(x),
        primary: inst.objective(x, cfg.mode, cfg.weights),
        secondary: 0.0,
    });
    let inst = &insts[best.state_index];
    let decision = DecisionVector::from_array(best.x, inst.state);
    Ok(OptResult {
        decision,
        objective: best.score.primary,
        capital: inst.capital(&best.x),
        cost: decision.cost(),
        feasible: best.score.violation == 0.0,
        iterations: best.iterations,
        mode: cfg.mode,
        restarts: cfg.restarts.max(1),
        seed: cfg.seed,
    })
}
