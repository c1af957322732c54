//! Inverse-propensity (Horvitz-Thompson) estimators of the average treatment effect.

use crate::error::{Error, Result};
use crate::instances::{Arm, ProblemInstance};
use crate::scalar::Scalar;

/// One interaction round: the allocation used, the arm played, the outcome seen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Round<T> {
    pub t: usize,
    pub pi: T,
    pub arm: Arm,
    pub y: T,
}

/// History of one replication. Rounds are numbered contiguously from 1.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrialTrace<T> {
    rounds: Vec<Round<T>>,
}

impl<T: Scalar> TrialTrace<T> {
    pub fn new() -> Self {
        Self { rounds: Vec::new() }
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            rounds: Vec::with_capacity(n),
        }
    }

    /// Builds a trace from `(pi, arm, y)` triples, numbering rounds from 1.
    pub fn from_rounds<I>(rounds: I) -> Self
    where
        I: IntoIterator<Item = (T, Arm, T)>,
    {
        let mut trace = Self::new();
        for (pi, arm, y) in rounds {
            trace.push(pi, arm, y);
        }
        trace
    }

    pub fn push(&mut self, pi: T, arm: Arm, y: T) {
        let t = self.rounds.len() + 1;
        self.rounds.push(Round { t, pi, arm, y });
    }

    pub fn rounds(&self) -> &[Round<T>] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Appends `other`, renumbering its rounds.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for r in &other.rounds {
            out.push(r.pi, r.arm, r.y);
        }
        out
    }
}

/// Signed importance-weighted outcome `y (1[A=1]/pi - 1[A=0]/(1-pi))`.
#[inline]
pub fn ipw_term<T: Scalar>(y: T, arm: Arm, pi: T) -> T {
    match arm {
        Arm::Treatment => y / pi,
        Arm::Control => -(y / (T::one() - pi)),
    }
}

fn interior<T: Scalar>(pi: T) -> bool {
    pi > T::zero() && pi < T::one()
}

/// Horvitz-Thompson estimate under a fixed allocation `pi`.
pub fn ht_estimate<T: Scalar>(trace: &TrialTrace<T>, pi: T) -> Result<T> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if !interior(pi) {
        return Err(Error::NonpositivePropensity {
            round: 0,
            pi: pi.as_f64(),
        });
    }
    let sum = trace
        .rounds
        .iter()
        .fold(T::zero(), |acc, r| acc + ipw_term(r.y, r.arm, pi));
    Ok(sum / T::from_count(trace.len() as u64))
}

/// Adaptive Horvitz-Thompson estimate, weighting each round by its own allocation.
pub fn aht_estimate<T: Scalar>(trace: &TrialTrace<T>) -> Result<T> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let mut sum = T::zero();
    for r in &trace.rounds {
        if !interior(r.pi) {
            return Err(Error::NonpositivePropensity {
                round: r.t,
                pi: r.pi.as_f64(),
            });
        }
        sum = sum + ipw_term(r.y, r.arm, r.pi);
    }
    Ok(sum / T::from_count(trace.len() as u64))
}

/// Closed-form variance of the fixed-allocation estimator:
/// `(S1/pi + S0/(1-pi) - tau^2) / T`.
pub fn ht_fixed_variance<T: Scalar>(inst: &ProblemInstance<T>, pi: T, horizon: u64) -> T {
    let loss = inst.s1() / pi + inst.s0() / (T::one() - pi);
    (loss - inst.tau() * inst.tau()) / T::from_count(horizon)
}
