//! Problem instances: two bounded outcome distributions and their moments.

use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Outcome law for one arm. Every variant is supported on `[0, 1]`.
///
/// Serialized as `{"kind": "...", "params": {...}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum OutcomeDistribution<T> {
    Bernoulli {
        p: T,
    },
    /// `Beta(a, b)` on the unit interval.
    ScaledBeta {
        a: T,
        b: T,
    },
    PointMass {
        v: T,
    },
}

impl<T: Scalar> OutcomeDistribution<T> {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: T| x >= T::zero() && x <= T::one();
        match *self {
            Self::Bernoulli { p } if !unit(p) => {
                Err(Error::InvalidDistribution(format!("bernoulli p = {p} outside [0, 1]")))
            }
            Self::ScaledBeta { a, b } if !(a > T::zero() && b > T::zero() && a.is_finite() && b.is_finite()) => Err(
                Error::InvalidDistribution(format!("scaled-beta requires a, b > 0 (got a = {a}, b = {b})")),
            ),
            Self::PointMass { v } if !unit(v) => {
                Err(Error::InvalidDistribution(format!("point-mass v = {v} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> T {
        match *self {
            Self::Bernoulli { p } => p,
            Self::ScaledBeta { a, b } => a / (a + b),
            Self::PointMass { v } => v,
        }
    }

    /// Exact uncentered second moment `E[Y^2]`.
    pub fn second_moment(&self) -> T {
        second_moment(self)
    }

    /// Draws one outcome, advancing `rng`. Point masses consume no randomness.
    pub fn sample(&self, rng: &mut RngStream) -> T {
        match *self {
            Self::Bernoulli { p } => {
                if rng.bernoulli(p.as_f64()) {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::ScaledBeta { a, b } => {
                let beta = Beta::new(a.as_f64(), b.as_f64()).expect("validated beta parameters");
                T::lit(beta.sample(rng).clamp(0.0, 1.0))
            }
            Self::PointMass { v } => v,
        }
    }
}

pub fn second_moment<T: Scalar>(d: &OutcomeDistribution<T>) -> T {
    match *d {
        OutcomeDistribution::Bernoulli { p } => p,
        OutcomeDistribution::ScaledBeta { a, b } => a * (a + T::one()) / ((a + b) * (a + b + T::one())),
        OutcomeDistribution::PointMass { v } => v * v,
    }
}

/// Variance-minimizing treatment probability `sqrt(S1) / (sqrt(S0) + sqrt(S1))`.
///
/// A zero moment puts the optimum on the boundary; that is reported as
/// [`Error::DegenerateInstance`] instead of being clamped.
pub fn neyman_allocation<T: Scalar>(s0: T, s1: T) -> Result<T> {
    if !(s0 > T::zero() && s1 > T::zero()) {
        return Err(Error::DegenerateInstance(format!(
            "Neyman allocation needs positive second moments (S0 = {s0}, S1 = {s1})"
        )));
    }
    let (r0, r1) = (s0.sqrt(), s1.sqrt());
    Ok(r1 / (r0 + r1))
}

/// Arm index: 0 is control, 1 is treatment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    Control,
    Treatment,
}

impl Arm {
    pub fn index(self) -> usize {
        match self {
            Arm::Control => 0,
            Arm::Treatment => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Arm::Control
        } else {
            Arm::Treatment
        }
    }

    pub fn is_treatment(self) -> bool {
        self == Arm::Treatment
    }
}

/// Two outcome distributions plus their derived moments.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance<T> {
    control: OutcomeDistribution<T>,
    treatment: OutcomeDistribution<T>,
    s0: T,
    s1: T,
    tau: T,
}

impl<T: Scalar> ProblemInstance<T> {
    pub fn new(control: OutcomeDistribution<T>, treatment: OutcomeDistribution<T>) -> Result<Self> {
        control.validate()?;
        treatment.validate()?;
        Ok(Self {
            s0: control.second_moment(),
            s1: treatment.second_moment(),
            tau: treatment.mean() - control.mean(),
            control,
            treatment,
        })
    }

    pub fn bernoulli(p0: T, p1: T) -> Result<Self> {
        Self::new(
            OutcomeDistribution::Bernoulli { p: p0 },
            OutcomeDistribution::Bernoulli { p: p1 },
        )
    }

    pub fn control(&self) -> &OutcomeDistribution<T> {
        &self.control
    }

    pub fn treatment(&self) -> &OutcomeDistribution<T> {
        &self.treatment
    }

    pub fn arm(&self, arm: Arm) -> &OutcomeDistribution<T> {
        match arm {
            Arm::Control => &self.control,
            Arm::Treatment => &self.treatment,
        }
    }

    /// `E[Y(0)^2]`.
    pub fn s0(&self) -> T {
        self.s0
    }

    /// `E[Y(1)^2]`.
    pub fn s1(&self) -> T {
        self.s1
    }

    /// Average treatment effect `E[Y(1)] - E[Y(0)]`.
    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn pi_star(&self) -> Result<T> {
        neyman_allocation(self.s0, self.s1)
    }

    /// Same instance with the arms swapped.
    pub fn swapped(&self) -> Self {
        Self {
            control: self.treatment,
            treatment: self.control,
            s0: self.s1,
            s1: self.s0,
            tau: -self.tau,
        }
    }
}

pub fn sample_outcome<T: Scalar>(inst: &ProblemInstance<T>, arm: Arm, rng: &mut RngStream) -> T {
    inst.arm(arm).sample(rng)
}

/// Default 3x3 Bernoulli grid. Columns fix the treatment mean
/// (0.02, 0.04, 0.06); rows fix the Neyman allocation (0.2, 0.35, 0.5).
pub fn reference_grid() -> Vec<(String, ProblemInstance<f64>)> {
    let mut grid = Vec::with_capacity(9);
    for pi_star in [0.2, 0.35, 0.5] {
        for p1 in [0.02, 0.04, 0.06] {
            let ratio: f64 = (1.0 - pi_star) / pi_star;
            let p0 = p1 * ratio * ratio;
            let inst = ProblemInstance::bernoulli(p0, p1).expect("grid parameters are valid");
            grid.push((format!("pi{pi_star:.2}_p1{p1:.2}"), inst));
        }
    }
    grid
}
