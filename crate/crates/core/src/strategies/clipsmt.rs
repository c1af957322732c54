use super::{clip_unchecked, clipping_sequence, unclipped_allocation, AllocationStrategy, SufficientStats};
use crate::instances::Arm;
use crate::scalar::Scalar;

/// Clipped second-moment tracking.
///
/// Plays the empirical Neyman allocation from the previous rounds, clipped to
/// `[delta_t, 1 - delta_t]` with `delta_t = t^(-alpha) / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClipSmt<T> {
    stats: SufficientStats<T>,
    alpha: T,
    t: u64,
}

impl<T: Scalar> ClipSmt<T> {
    pub fn new(alpha: T) -> Self {
        Self::with_stats(alpha, SufficientStats::new())
    }

    /// Resumes from existing statistics; the next round is `stats.rounds() + 1`.
    pub fn with_stats(alpha: T, stats: SufficientStats<T>) -> Self {
        Self {
            t: stats.rounds() + 1,
            stats,
            alpha,
        }
    }

    /// Overrides the round counter. Only the clipping guard depends on it.
    pub fn at_round(mut self, t: u64) -> Self {
        self.t = t.max(1);
        self
    }

    pub fn stats(&self) -> &SufficientStats<T> {
        &self.stats
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn delta(&self) -> T {
        clipping_sequence(self.t, self.alpha)
    }
}

impl<T: Scalar> AllocationStrategy<T> for ClipSmt<T> {
    #[inline]
    fn next_allocation(&self) -> T {
        let delta = self.delta();
        clip_unchecked(unclipped_allocation(&self.stats), delta, T::one() - delta)
    }

    #[inline]
    fn proposal(&self) -> Option<T> {
        Some(unclipped_allocation(&self.stats))
    }

    #[inline]
    fn update(&mut self, arm: Arm, y: T) {
        self.stats.update(arm, y);
        self.t += 1;
    }
}
