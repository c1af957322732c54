use super::{clip_unchecked, unclipped_allocation, AllocationStrategy, SufficientStats};
use crate::instances::Arm;
use crate::scalar::Scalar;

/// `ceil(T^(1/3))`, computed exactly in integers.
pub fn explore_length(horizon: u64) -> u64 {
    let mut k = (horizon as f64).cbrt().round() as u64;
    while k > 0 && (k - 1).saturating_pow(3) >= horizon {
        k -= 1;
    }
    while k.saturating_pow(3) < horizon {
        k += 1;
    }
    k.max(1)
}

/// Explore-then-commit: balanced allocation for `ceil(T^(1/3))` rounds, then
/// the empirical Neyman allocation for the rest of the horizon.
///
/// The committed value is clipped to `[T^(-1/3)/2, 1 - T^(-1/3)/2]` so that a
/// zero empirical moment cannot commit to a boundary allocation.
#[derive(Clone, Debug, PartialEq)]
pub struct ExploreThenCommit<T> {
    explore_len: u64,
    floor: T,
    stats: SufficientStats<T>,
    committed: Option<T>,
}

impl<T: Scalar> ExploreThenCommit<T> {
    pub fn new(horizon: u64) -> Self {
        let horizon = horizon.max(1);
        Self {
            explore_len: explore_length(horizon),
            floor: T::half() * T::from_count(horizon).powf(-T::one() / T::lit(3.0)),
            stats: SufficientStats::new(),
            committed: None,
        }
    }

    /// Explore phase that has already absorbed `stats`; commits immediately if
    /// the phase is complete.
    pub fn with_stats(horizon: u64, stats: SufficientStats<T>) -> Self {
        let mut s = Self::new(horizon);
        s.stats = stats;
        s.maybe_commit();
        s
    }

    pub fn explore_len(&self) -> u64 {
        self.explore_len
    }

    pub fn committed(&self) -> Option<T> {
        self.committed
    }

    fn maybe_commit(&mut self) {
        if self.committed.is_none() && self.stats.rounds() >= self.explore_len {
            let pi = unclipped_allocation(&self.stats);
            self.committed = Some(clip_unchecked(pi, self.floor, T::one() - self.floor));
        }
    }
}

impl<T: Scalar> AllocationStrategy<T> for ExploreThenCommit<T> {
    #[inline]
    fn next_allocation(&self) -> T {
        self.committed.unwrap_or_else(T::half)
    }

    fn update(&mut self, arm: Arm, y: T) {
        if self.committed.is_none() {
            self.stats.update(arm, y);
            self.maybe_commit();
        }
    }
}
