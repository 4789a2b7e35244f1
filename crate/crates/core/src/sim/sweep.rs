use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::{decide, Aggregate, ConditionId, ConditionSet, Status};
use crate::config::EvalConfig;
use crate::scenario::Scenario;

use super::sample::{sample_one, DistributionSpec, STREAM_ALGORITHM};
use super::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRate {
    pub id: ConditionId,
    pub satisfied: usize,
    pub vacuously_satisfied: usize,
    pub violated: usize,
    pub indeterminate: usize,
    pub skipped: usize,
    /// `(satisfied + vacuously_satisfied + skipped) / n`
    pub frequency: f64,
    pub indeterminate_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetRate {
    pub set: ConditionSet,
    pub satisfied_rate: f64,
    pub not_satisfied_rate: f64,
    pub indeterminate_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStats {
    pub n: usize,
    pub seed: u64,
    pub stream: String,
    pub rejections: usize,
    pub conditions: Vec<ConditionRate>,
    pub sets: Vec<SetRate>,
    pub distribution: DistributionSpec,
    pub config: EvalConfig,
}

/// Per-draw outcome: statuses in condition order, then the three aggregates.
struct DrawOutcome {
    statuses: Vec<Status>,
    aggregates: [Aggregate; 3],
    rejections: usize,
}

fn evaluate_draw(base: &Scenario, dist: &DistributionSpec, seed: u64, i: usize, limit: usize, cfg: &EvalConfig) -> Result<DrawOutcome, usize> {
    let (s, rejections) = sample_one(base, dist, seed, i as u64, limit)?;
    let d = decide(&s, cfg);
    let statuses = d.reports().iter().flat_map(|r| r.verdicts.iter().map(|v| v.status)).collect();
    Ok(DrawOutcome {
        statuses,
        aggregates: [d.buyer_disintermediates, d.broker_provides_web_info, d.seller_disintermediates],
        rejections,
    })
}

/// Evaluate `decide` on `n` seeded draws. Results do not depend on
/// `workers`: each draw has its own substream and counts are merged in draw
/// order. `workers = None` uses the global thread pool.
pub fn run_sweep(
    base: &Scenario,
    dist: &DistributionSpec,
    n: usize,
    seed: u64,
    cfg: &EvalConfig,
    workers: Option<usize>,
) -> Result<SweepStats, SimError> {
    if n == 0 {
        return Err(SimError::InvalidDistribution("n must be at least 1".into()));
    }
    dist.check()?;
    let limit = 1000 * n;
    let run = || -> Vec<Result<DrawOutcome, usize>> {
        (0..n).into_par_iter().map(|i| evaluate_draw(base, dist, seed, i, limit, cfg)).collect()
    };
    let outcomes = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| SimError::InvalidDistribution(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let ids: Vec<ConditionId> = ConditionId::all().collect();
    let mut counts = vec![[0usize; 5]; ids.len()];
    let mut agg = [[0usize; 3]; 3];
    let mut rejections = 0usize;
    for o in outcomes {
        let o = match o {
            Ok(o) => o,
            Err(r) => return Err(SimError::RejectionLimit { rejections: rejections + r, limit }),
        };
        rejections += o.rejections;
        for (c, st) in counts.iter_mut().zip(&o.statuses) {
            let k = match st {
                Status::Satisfied => 0,
                Status::VacuouslySatisfied => 1,
                Status::Violated => 2,
                Status::Indeterminate => 3,
                Status::Skipped => 4,
            };
            c[k] += 1;
        }
        for (a, g) in agg.iter_mut().zip(o.aggregates) {
            let k = match g {
                Aggregate::Satisfied => 0,
                Aggregate::NotSatisfied => 1,
                Aggregate::Indeterminate => 2,
            };
            a[k] += 1;
        }
    }
    if rejections > limit {
        return Err(SimError::RejectionLimit { rejections, limit });
    }

    let rate = |k: usize| k as f64 / n as f64;
    let conditions = ids
        .iter()
        .zip(&counts)
        .map(|(&id, c)| ConditionRate {
            id,
            satisfied: c[0],
            vacuously_satisfied: c[1],
            violated: c[2],
            indeterminate: c[3],
            skipped: c[4],
            frequency: rate(c[0] + c[1] + c[4]),
            indeterminate_rate: rate(c[3]),
        })
        .collect();
    let sets = ConditionSet::ALL
        .iter()
        .zip(&agg)
        .map(|(&set, a)| SetRate {
            set,
            satisfied_rate: rate(a[0]),
            not_satisfied_rate: rate(a[1]),
            indeterminate_rate: rate(a[2]),
        })
        .collect();

    Ok(SweepStats {
        n,
        seed,
        stream: STREAM_ALGORITHM.to_string(),
        rejections,
        conditions,
        sets,
        distribution: dist.clone(),
        config: *cfg,
    })
}

impl SweepStats {
    pub fn set_rate(&self, set: ConditionSet) -> &SetRate {
        self.sets.iter().find(|r| r.set == set).expect("all sets present")
    }

    pub fn condition(&self, id: ConditionId) -> &ConditionRate {
        self.conditions.iter().find(|r| r.id == id).expect("all conditions present")
    }

    /// Keep only the rows of one condition set.
    pub fn restrict(mut self, set: ConditionSet) -> Self {
        self.conditions.retain(|r| r.id.set == set);
        self.sets.retain(|r| r.set == set);
        self
    }
}
