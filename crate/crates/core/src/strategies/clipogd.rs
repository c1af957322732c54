use super::{clip_unchecked, clipping_sequence, AllocationStrategy};
use crate::instances::Arm;
use crate::scalar::Scalar;

/// Unbiased stochastic gradient of the Neyman loss at `pi` from one observation.
///
/// Its conditional expectation over `A ~ Bernoulli(pi)` equals
/// `-S1/pi^2 + S0/(1-pi)^2`.
#[inline]
pub fn clipogd_gradient<T: Scalar>(pi: T, arm: Arm, y: T) -> T {
    let y2 = y * y;
    match arm {
        Arm::Treatment => -y2 / (pi * pi * pi),
        Arm::Control => {
            let q = T::one() - pi;
            y2 / (q * q * q)
        }
    }
}

/// Projected online gradient descent on the Neyman loss.
///
/// Step size `eta0 / sqrt(T)`; projection onto `[delta_t, 1 - delta_t]` with
/// `delta_t = t^(-clip_exponent) / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClipOgd<T> {
    pi: T,
    eta: T,
    clip_exponent: T,
    t: u64,
}

impl<T: Scalar> ClipOgd<T> {
    pub fn new(eta0: T, clip_exponent: T, horizon: u64) -> Self {
        Self {
            pi: T::half(),
            eta: eta0 / T::from_count(horizon.max(1)).sqrt(),
            clip_exponent,
            t: 1,
        }
    }

    pub fn iterate(&self) -> T {
        self.pi
    }

    pub fn step_size(&self) -> T {
        self.eta
    }

    fn project(&self, x: T, t: u64) -> T {
        let delta = clipping_sequence(t, self.clip_exponent);
        clip_unchecked(x, delta, T::one() - delta)
    }
}

impl<T: Scalar> AllocationStrategy<T> for ClipOgd<T> {
    #[inline]
    fn next_allocation(&self) -> T {
        self.project(self.pi, self.t)
    }

    fn update(&mut self, arm: Arm, y: T) {
        let played = self.next_allocation();
        let g = clipogd_gradient(played, arm, y);
        self.t += 1;
        self.pi = self.project(played - self.eta * g, self.t);
    }
}
