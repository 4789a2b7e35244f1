//! Seeded scenario sampling with rejection of invalid draws.

use std::collections::BTreeMap;
use std::path::Path;

use rand::distr::{weighted::WeightedIndex, Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::scenario::{validate_scenario, Scenario};
use crate::symbols::Symbol;

use super::SimError;

/// Recorded in every sweep so the draw sequence can be replayed.
pub const STREAM_ALGORITHM: &str = "ChaCha8Rng::seed_from_u64(seed), stream = draw index";

/// Tries allowed when redrawing a truncated normal into its domain.
const TRUNCATION_TRIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Marginal {
    Point { value: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Truncated to the symbol's domain by redrawing.
    Normal { mean: f64, sd: f64 },
    Discrete { values: Vec<f64>, weights: Vec<f64> },
}

/// Independent per-symbol marginals; symbols not listed keep their base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub marginals: BTreeMap<Symbol, Marginal>,
}

#[derive(Debug, thiserror::Error)]
pub enum DistributionFileError {
    #[error("cannot read distribution {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("distribution parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

impl DistributionSpec {
    pub fn point_mass() -> Self {
        DistributionSpec::default()
    }

    pub fn with(mut self, sym: Symbol, m: Marginal) -> Self {
        self.marginals.insert(sym, m);
        self
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DistributionFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| DistributionFileError::Io { path: path.display().to_string(), source })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn check(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidDistribution(m));
        for (&sym, m) in &self.marginals {
            if sym == Symbol::I {
                return bad("I is derived from I_p + I_i; sample the components instead".into());
            }
            match m {
                Marginal::Point { value } if !value.is_finite() => return bad(format!("{sym}: non-finite point")),
                Marginal::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo <= hi) => {
                    return bad(format!("{sym}: uniform needs finite lo <= hi"))
                }
                Marginal::Normal { mean, sd } if !(mean.is_finite() && sd.is_finite() && *sd >= 0.0) => {
                    return bad(format!("{sym}: normal needs finite mean and sd >= 0"))
                }
                Marginal::Discrete { values, weights } => {
                    if values.is_empty() || values.len() != weights.len() {
                        return bad(format!("{sym}: discrete needs equal, non-empty values and weights"));
                    }
                    if values.iter().any(|v| !v.is_finite()) || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                        return bad(format!("{sym}: discrete values must be finite and weights non-negative"));
                    }
                    if !(weights.iter().sum::<f64>() > 0.0) {
                        return bad(format!("{sym}: discrete weights sum to zero"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Whether `x` lies in the value domain of `sym`.
fn in_domain(sym: Symbol, x: f64) -> bool {
    match sym {
        Symbol::P | Symbol::Pb => x > 0.0,
        Symbol::C => x > 0.0 && x < 1.0,
        s if s.is_probability() => (0.0..=1.0).contains(&x),
        _ => x.is_finite(),
    }
}

fn draw(sym: Symbol, m: &Marginal, rng: &mut ChaCha8Rng) -> f64 {
    match m {
        Marginal::Point { value } => *value,
        Marginal::Uniform { lo, hi } => {
            if lo == hi {
                *lo
            } else {
                Uniform::new_inclusive(*lo, *hi).expect("checked bounds").sample(rng)
            }
        }
        Marginal::Normal { mean, sd } => {
            if *sd == 0.0 {
                return *mean;
            }
            let n = Normal::new(*mean, *sd).expect("checked sd");
            let mut x = n.sample(rng);
            for _ in 0..TRUNCATION_TRIES {
                if in_domain(sym, x) {
                    break;
                }
                x = n.sample(rng);
            }
            x
        }
        Marginal::Discrete { values, weights } => {
            let idx = WeightedIndex::new(weights).expect("checked weights").sample(rng);
            values[idx]
        }
    }
}

/// Draw `index` of the sequence for `(base, dist, seed)`, with the number of
/// rejected attempts before it. Gives up after `max_rejections`.
pub fn sample_one(
    base: &Scenario,
    dist: &DistributionSpec,
    seed: u64,
    index: u64,
    max_rejections: usize,
) -> Result<(Scenario, usize), usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut rejections = 0;
    loop {
        let mut s = base.clone();
        let mut moved = false;
        for (&sym, m) in &dist.marginals {
            let v = draw(sym, m, &mut rng);
            moved |= v != s.get(sym);
            s.set(sym, v);
        }
        if moved {
            s.info.i = s.info.i_p + s.info.i_i;
            s.reanchor_responses();
        }
        if validate_scenario(&s).ok {
            return Ok((s, rejections));
        }
        rejections += 1;
        if rejections > max_rejections {
            return Err(rejections);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub scenarios: Vec<Scenario>,
    pub rejections: usize,
}

/// `n` valid scenarios drawn around `base`. Draw `i` uses its own stream of
/// the master seed, so any subset can be replayed independently.
pub fn sample_scenarios(base: &Scenario, dist: &DistributionSpec, n: usize, seed: u64) -> Result<Samples, SimError> {
    if n == 0 {
        return Err(SimError::InvalidDistribution("n must be at least 1".into()));
    }
    dist.check()?;
    let limit = 1000 * n;
    let mut scenarios = Vec::with_capacity(n);
    let mut rejections = 0;
    for i in 0..n {
        match sample_one(base, dist, seed, i as u64, limit - rejections) {
            Ok((s, r)) => {
                rejections += r;
                scenarios.push(s);
            }
            Err(r) => return Err(SimError::RejectionLimit { rejections: rejections + r, limit }),
        }
    }
    Ok(Samples { scenarios, rejections })
}
