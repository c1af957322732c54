use super::AllocationStrategy;
use crate::instances::Arm;
use crate::scalar::Scalar;

/// Non-adaptive design with a constant treatment probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fixed<T> {
    pi: T,
}

impl<T: Scalar> Fixed<T> {
    pub fn new(pi: T) -> Self {
        Self { pi }
    }

    pub fn balanced() -> Self {
        Self::new(T::half())
    }
}

impl<T: Scalar> AllocationStrategy<T> for Fixed<T> {
    #[inline]
    fn next_allocation(&self) -> T {
        self.pi
    }

    #[inline]
    fn update(&mut self, _arm: Arm, _y: T) {}
}
