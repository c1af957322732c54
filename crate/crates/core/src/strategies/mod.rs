//! Sequential allocation strategies.
//!
//! A strategy is a plain state value with two operations: report the
//! treatment probability for the next round, and absorb the observed
//! `(arm, outcome)` pair. States are `Clone`, so a run can be replayed or
//! forked at any round.

mod clipogd;
mod clipsmt;
mod etc;
mod fixed;
mod spec;

pub use clipogd::{clipogd_gradient, ClipOgd};
pub use clipsmt::ClipSmt;
pub use etc::{explore_length, ExploreThenCommit};
pub use fixed::Fixed;
pub use spec::{StrategyKind, StrategySpec};

use crate::error::{Error, Result};
use crate::instances::Arm;
use crate::scalar::Scalar;

pub trait AllocationStrategy<T: Scalar> {
    /// Treatment probability for the upcoming round.
    fn next_allocation(&self) -> T;

    /// The allocation the strategy would play without clipping, if it clips.
    fn proposal(&self) -> Option<T> {
        None
    }

    fn update(&mut self, arm: Arm, y: T);

    fn updated(mut self, arm: Arm, y: T) -> Self
    where
        Self: Sized,
    {
        self.update(arm, y);
        self
    }
}

/// `min(hi, max(x, lo))`.
pub fn clip<T: Scalar>(x: T, lo: T, hi: T) -> Result<T> {
    if lo > hi {
        return Err(Error::InvertedBounds {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    Ok(clip_unchecked(x, lo, hi))
}

#[inline]
pub(crate) fn clip_unchecked<T: Scalar>(x: T, lo: T, hi: T) -> T {
    hi.min(x.max(lo))
}

/// Clipping guard `delta_t = t^(-alpha) / 2`.
#[inline]
pub fn clipping_sequence<T: Scalar>(t: u64, alpha: T) -> T {
    T::half() * T::from_count(t.max(1)).powf(-alpha)
}

/// Per-arm pull counts and sums of squared outcomes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SufficientStats<T> {
    n: [u64; 2],
    ssq: [T; 2],
}

impl<T: Scalar> Default for SufficientStats<T> {
    fn default() -> Self {
        Self {
            n: [0, 0],
            ssq: [T::zero(), T::zero()],
        }
    }
}

impl<T: Scalar> SufficientStats<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stats with the given counts and squared-outcome sums, indexed by arm.
    pub fn from_parts(n: [u64; 2], ssq: [T; 2]) -> Self {
        Self { n, ssq }
    }

    pub fn update(&mut self, arm: Arm, y: T) {
        let i = arm.index();
        self.n[i] += 1;
        self.ssq[i] = self.ssq[i] + y * y;
    }

    pub fn count(&self, arm: Arm) -> u64 {
        self.n[arm.index()]
    }

    pub fn sum_sq(&self, arm: Arm) -> T {
        self.ssq[arm.index()]
    }

    /// Total number of updates absorbed.
    pub fn rounds(&self) -> u64 {
        self.n[0] + self.n[1]
    }

    pub fn empirical_second_moment(&self, arm: Arm) -> Option<T> {
        let n = self.count(arm);
        (n > 0).then(|| self.sum_sq(arm) / T::from_count(n))
    }
}

/// Plug-in Neyman allocation from empirical second moments.
///
/// Falls back to `1/2` while an arm is unobserved or when both empirical
/// moments are zero.
pub fn unclipped_allocation<T: Scalar>(stats: &SufficientStats<T>) -> T {
    let (Some(s0), Some(s1)) = (
        stats.empirical_second_moment(Arm::Control),
        stats.empirical_second_moment(Arm::Treatment),
    ) else {
        return T::half();
    };
    let (r0, r1) = (s0.sqrt(), s1.sqrt());
    let denom = r0 + r1;
    if denom > T::zero() {
        r1 / denom
    } else {
        T::half()
    }
}

/// Runtime-selected strategy.
#[derive(Clone, Debug)]
pub enum Strategy<T> {
    ClipSmt(ClipSmt<T>),
    ClipOgd(ClipOgd<T>),
    Etc(ExploreThenCommit<T>),
    Fixed(Fixed<T>),
}

impl<T: Scalar> AllocationStrategy<T> for Strategy<T> {
    #[inline]
    fn next_allocation(&self) -> T {
        match self {
            Strategy::ClipSmt(s) => s.next_allocation(),
            Strategy::ClipOgd(s) => s.next_allocation(),
            Strategy::Etc(s) => s.next_allocation(),
            Strategy::Fixed(s) => s.next_allocation(),
        }
    }

    #[inline]
    fn proposal(&self) -> Option<T> {
        match self {
            Strategy::ClipSmt(s) => s.proposal(),
            Strategy::ClipOgd(s) => s.proposal(),
            Strategy::Etc(s) => s.proposal(),
            Strategy::Fixed(s) => s.proposal(),
        }
    }

    #[inline]
    fn update(&mut self, arm: Arm, y: T) {
        match self {
            Strategy::ClipSmt(s) => s.update(arm, y),
            Strategy::ClipOgd(s) => s.update(arm, y),
            Strategy::Etc(s) => s.update(arm, y),
            Strategy::Fixed(s) => s.update(arm, y),
        }
    }
}
