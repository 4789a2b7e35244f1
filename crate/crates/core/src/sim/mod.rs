//! Seeded Monte Carlo sweeps and local sensitivity of single conditions.

pub mod sample;
pub mod sensitivity;
pub mod sweep;

use crate::conditions::ConditionId;

pub use sample::{sample_one, sample_scenarios, DistributionSpec, Marginal, Samples, STREAM_ALGORITHM};
pub use sensitivity::{sensitivity, SensitivityResult};
pub use sweep::{run_sweep, ConditionRate, SetRate, SweepStats};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("rejection limit reached: {rejections} rejected draws (limit {limit})")]
    RejectionLimit { rejections: usize, limit: usize },
    #[error("{0} is indeterminate at the base scenario")]
    IndeterminateAtBase(ConditionId),
    #[error("{0} is vacuous at the base scenario")]
    VacuousAtBase(ConditionId),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
}
