//! ε-constraint sweep of the cost/capital frontier.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::OptimizerConfig;
use crate::scenario::Scenario;

use super::objective::DecisionVector;
use super::search::{instances, solve, Local, Score};
use super::{Bounds, OptError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub cost: f64,
    pub capital: f64,
    pub decision: DecisionVector,
}

impl ParetoPoint {
    /// No worse in both objectives and strictly better in one.
    pub fn dominates(&self, other: &ParetoPoint) -> bool {
        self.cost <= other.cost && self.capital >= other.capital && (self.cost < other.cost || self.capital > other.capital)
    }
}

fn cost_of(x: &[f64; 4]) -> f64 {
    x[0] + x[1] + x[2] + x[3]
}

fn eps_tol(eps: f64) -> f64 {
    1e-12 * eps.abs().max(1.0)
}

fn point(insts: &[super::Instance<'_>], l: &Local) -> ParetoPoint {
    let inst = &insts[l.state_index];
    ParetoPoint { cost: cost_of(&l.x), capital: inst.capital(&l.x), decision: DecisionVector::from_array(l.x, inst.state) }
}

/// Largest capital reachable with cost at most `eps`, ties broken toward
/// lower cost. `None` when no feasible point meets the budget.
pub fn max_capital_within(s: &Scenario, bounds: &Bounds, eps: f64, cfg: &OptimizerConfig) -> Result<Option<ParetoPoint>, OptError> {
    let resolved = bounds.resolve(s)?;
    let insts = instances(s, &resolved)?;
    let l = constrained(&insts, &resolved, cfg, eps, &[]);
    Ok((l.score.violation == 0.0).then(|| point(&insts, &l)))
}

fn constrained(
    insts: &[super::Instance<'_>],
    resolved: &super::Resolved,
    cfg: &OptimizerConfig,
    eps: f64,
    extra: &[(usize, [f64; 4])],
) -> Local {
    solve(insts, resolved, cfg, extra, |inst, x| {
        let cost = cost_of(x);
        Score {
            violation: inst.violation(x) + (cost - eps - eps_tol(eps)).max(0.0),
            primary: inst.capital(x),
            secondary: -cost,
        }
    })
}

/// Sweep `k` budgets evenly from the minimum feasible cost to the cost of
/// the capital-maximising solution; return the non-dominated results sorted
/// by cost. Empty when the box admits no feasible point.
pub fn pareto_sweep(s: &Scenario, bounds: &Bounds, k: usize, cfg: &OptimizerConfig) -> Result<Vec<ParetoPoint>, OptError> {
    if k < 2 {
        return Err(OptError::InvalidBounds(format!("need at least 2 frontier points, got {k}")));
    }
    let resolved = bounds.resolve(s)?;
    let insts = instances(s, &resolved)?;

    let cheapest = solve(&insts, &resolved, cfg, &[], |inst, x| Score {
        violation: inst.violation(x),
        primary: -cost_of(x),
        secondary: inst.capital(x),
    });
    if cheapest.score.violation > 0.0 {
        return Ok(Vec::new());
    }
    let richest = solve(&insts, &resolved, cfg, &[(cheapest.state_index, cheapest.x)], |inst, x| Score {
        violation: inst.violation(x),
        primary: inst.capital(x),
        secondary: -cost_of(x),
    });
    let lo = cost_of(&cheapest.x);
    let hi = cost_of(&richest.x).max(lo);

    let budgets: Vec<f64> = (0..k).map(|j| lo + (hi - lo) * j as f64 / (k - 1) as f64).collect();
    let seeds = [(cheapest.state_index, cheapest.x), (richest.state_index, richest.x)];
    let mut points: Vec<ParetoPoint> = budgets
        .par_iter()
        .enumerate()
        .map(|(j, &eps)| {
            // The richest solution already fits the last budget.
            if j == k - 1 {
                return point(&insts, &richest);
            }
            let l = constrained(&insts, &resolved, cfg, eps, &seeds[..1]);
            point(&insts, &l)
        })
        .collect();

    let snapshot = points.clone();
    points.retain(|p| !snapshot.iter().any(|q| q.dominates(p)));
    points.sort_by(|a, b| a.cost.total_cmp(&b.cost).then(b.capital.total_cmp(&a.capital)));
    points.dedup_by(|a, b| {
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0);
        close(a.cost, b.cost) && close(a.capital, b.capital)
    });
    Ok(points)
}
