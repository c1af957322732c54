//! Adaptive Neyman allocation for average-treatment-effect estimation.
//!
//! The numeric core (instances, estimators, strategies, regret, theory) is
//! generic over [`Scalar`] (`f32` or `f64`). The Monte Carlo [`harness`]
//! runs in `f64`; the aliases below name the `f64` instantiations it uses.

pub mod error;
pub mod estimators;
pub mod harness;
pub mod instances;
pub mod regret;
pub mod rng;
pub mod scalar;
pub mod strategies;
pub mod theory;

pub use error::{Error, Result};
pub use instances::{Arm, OutcomeDistribution, ProblemInstance};
pub use rng::RngStream;
pub use scalar::Scalar;
pub use strategies::{AllocationStrategy, StrategySpec};

pub type Real = f64;
pub type Instance = instances::ProblemInstance<Real>;
pub type Distribution = instances::OutcomeDistribution<Real>;
pub type Trace = estimators::TrialTrace<Real>;
pub type Ledger = regret::RegretLedger<Real>;
pub type Stats = strategies::SufficientStats<Real>;
pub type ClipPrediction = theory::ClipPhasePrediction<Real>;
