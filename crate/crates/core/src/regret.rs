//! Neyman loss and regret accounting.

use crate::error::{Error, Result};
use crate::estimators::TrialTrace;
use crate::instances::ProblemInstance;
use crate::scalar::Scalar;

/// `S1/pi + S0/(1-pi)`: `T` times the variance contribution of one round, plus `tau^2`.
pub fn neyman_loss<T: Scalar>(pi: T, s0: T, s1: T) -> Result<T> {
    if !(pi > T::zero() && pi < T::one()) {
        return Err(Error::BoundaryAllocation(pi.as_f64()));
    }
    Ok(s1 / pi + s0 / (T::one() - pi))
}

/// Instantaneous regret `L(pi) - L(pi*)`, floored at zero to absorb rounding.
#[inline]
pub fn simple_regret<T: Scalar>(pi: T, s0: T, s1: T, optimal_loss: T) -> Result<T> {
    Ok((neyman_loss(pi, s0, s1)? - optimal_loss).max(T::zero()))
}

/// Per-round Neyman losses of one run and their excess over the optimum.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretLedger<T> {
    losses: Vec<T>,
    optimal_loss: T,
    terms: Vec<T>,
    cumulative: T,
}

impl<T: Scalar> RegretLedger<T> {
    pub fn new(optimal_loss: T) -> Self {
        Self {
            losses: Vec::new(),
            optimal_loss,
            terms: Vec::new(),
            cumulative: T::zero(),
        }
    }

    pub fn record(&mut self, loss: T) {
        let term = (loss - self.optimal_loss).max(T::zero());
        self.losses.push(loss);
        self.terms.push(term);
        self.cumulative = self.cumulative + term;
    }

    pub fn losses(&self) -> &[T] {
        &self.losses
    }

    /// Instantaneous regret per round.
    pub fn terms(&self) -> &[T] {
        &self.terms
    }

    pub fn optimal_loss(&self) -> T {
        self.optimal_loss
    }

    /// `R_T`.
    pub fn regret(&self) -> T {
        self.cumulative
    }

    /// Cumulative regret after the first `t` rounds.
    pub fn regret_at(&self, t: usize) -> T {
        self.terms[..t.min(self.terms.len())]
            .iter()
            .fold(T::zero(), |acc, &x| acc + x)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Neyman regret of a trace against the instance's true second moments.
pub fn neyman_regret<T: Scalar>(trace: &TrialTrace<T>, inst: &ProblemInstance<T>) -> Result<RegretLedger<T>> {
    let (s0, s1) = (inst.s0(), inst.s1());
    let optimal = neyman_loss(inst.pi_star()?, s0, s1)?;
    let mut ledger = RegretLedger::new(optimal);
    for r in trace.rounds() {
        ledger.record(neyman_loss(r.pi, s0, s1)?);
    }
    Ok(ledger)
}

/// Leading coefficient `(sqrt S0 + sqrt S1)^3 (1/sqrt S0 + 1/sqrt S1)` of the
/// quadratic expansion `L(pi* + d) - L(pi*) ~ c d^2`.
pub fn regret_curvature<T: Scalar>(inst: &ProblemInstance<T>) -> T {
    let (r0, r1) = (inst.s0().sqrt(), inst.s1().sqrt());
    let sum = r0 + r1;
    sum * sum * sum * (r0.recip() + r1.recip())
}

/// Constants `(lo, hi)` with `lo d^2 <= L(pi* + d) - L(pi*) <= hi d^2` for all
/// `|d| <= radius`.
///
/// Uses `L(pi) - L(pi*) = (sqrt S0 + sqrt S1)^2 d^2 / (pi (1 - pi))`, so the
/// extreme ratios sit where `pi (1 - pi)` is extreme over the window.
pub fn regret_quadratic_bounds<T: Scalar>(inst: &ProblemInstance<T>, radius: T) -> Result<(T, T)> {
    let pi_star = inst.pi_star()?;
    let (a, b) = (pi_star - radius, pi_star + radius);
    if !(a > T::zero() && b < T::one()) {
        return Err(Error::PreconditionViolated(format!(
            "window radius {radius} leaves (0, 1) around pi* = {pi_star}"
        )));
    }
    let root_sum = inst.s0().sqrt() + inst.s1().sqrt();
    let scale = root_sum * root_sum;
    let var = |p: T| p * (T::one() - p);
    let half = T::half();
    let widest = if a <= half && half <= b {
        var(half)
    } else {
        var(a).max(var(b))
    };
    let narrowest = var(a).min(var(b));
    Ok((scale / widest, scale / narrowest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{reference_grid, Arm, Arm::*, OutcomeDistribution};

    fn pm(v0: f64, v1: f64) -> ProblemInstance<f64> {
        ProblemInstance::new(
            OutcomeDistribution::PointMass { v: v0 },
            OutcomeDistribution::PointMass { v: v1 },
        )
        .unwrap()
    }

    #[test]
    fn loss_examples() {
        assert_eq!(neyman_loss(0.5, 0.25, 0.25).unwrap(), 1.0);
        let pi = 2.0 / 3.0;
        assert!((neyman_loss::<f64>(pi, 0.01, 0.04).unwrap() - 0.09).abs() < 1e-15);
        assert!(matches!(neyman_loss(0.0, 0.1, 0.1), Err(Error::BoundaryAllocation(_))));
        assert!(neyman_loss(1.0, 0.1, 0.1).is_err());
    }

    #[test]
    fn loss_minimized_at_neyman_allocation() {
        let inst = ProblemInstance::bernoulli(0.3, 0.05).unwrap();
        let best = neyman_loss(inst.pi_star().unwrap(), inst.s0(), inst.s1()).unwrap();
        for i in 1..1000 {
            let pi = i as f64 / 1000.0;
            assert!(neyman_loss(pi, inst.s0(), inst.s1()).unwrap() >= best);
        }
    }

    #[test]
    fn regret_examples() {
        // S0 = 0.01, S1 = 0.04
        let inst = pm(0.1, 0.2);
        let ps = inst.pi_star().unwrap();
        let t = TrialTrace::from_rounds((0..50).map(|i| (ps, Arm::from_index(i % 2), 0.3)));
        assert_eq!(neyman_regret(&t, &inst).unwrap().regret(), 0.0);

        let t = TrialTrace::from_rounds([(0.5, Treatment, 0.2)]);
        let r = neyman_regret(&t, &inst).unwrap().regret();
        assert!((r - 0.01).abs() < 1e-15, "{r}");
    }

    #[test]
    fn regret_monotone_and_additive() {
        let inst = ProblemInstance::bernoulli(0.4, 0.1).unwrap();
        let a = TrialTrace::from_rounds((0..30).map(|i| (0.1 + 0.02 * i as f64, Treatment, 1.0)));
        let b = TrialTrace::from_rounds((0..20).map(|i| (0.7 - 0.03 * i as f64, Control, 0.0)));
        let la = neyman_regret(&a, &inst).unwrap();
        let lb = neyman_regret(&b, &inst).unwrap();
        let lab = neyman_regret(&a.concat(&b), &inst).unwrap();
        assert!(lab.terms().iter().all(|&x| x >= 0.0));
        assert!((lab.regret() - (la.regret() + lb.regret())).abs() < 1e-12);
        let mut prev = 0.0;
        for t in 0..=lab.len() {
            let r = lab.regret_at(t);
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn curvature_examples() {
        assert_eq!(regret_curvature(&pm(0.5, 0.5)), 4.0);
        assert!((regret_curvature(&pm(0.1, 0.2)) - 0.405).abs() < 1e-14);
        let i = ProblemInstance::<f64>::bernoulli(0.3, 0.07).unwrap();
        assert!((regret_curvature(&i) - regret_curvature(&i.swapped())).abs() < 1e-14);
    }

    #[test]
    fn quadratic_expansion_matches_curvature() {
        for (name, inst) in reference_grid() {
            let ps = inst.pi_star().unwrap();
            let best = neyman_loss(ps, inst.s0(), inst.s1()).unwrap();
            let c = regret_curvature(&inst);
            let scale = (1.0 / inst.s0().sqrt()).max(1.0 / inst.s1().sqrt());
            for d in [1e-2, -1e-2, 1e-3, -1e-3] {
                let ratio = (neyman_loss(ps + d, inst.s0(), inst.s1()).unwrap() - best) / (d * d);
                let tol = 0.1 * c * d.abs() * scale * 10.0;
                assert!((ratio - c).abs() <= tol, "{name} d={d}: {ratio} vs {c}");
            }
        }
    }

    #[test]
    fn two_sided_quadratic_bound() {
        for (name, inst) in reference_grid() {
            let ps = inst.pi_star().unwrap();
            let radius = ps.min(1.0 - ps) / 2.0;
            let (lo, hi) = regret_quadratic_bounds(&inst, radius).unwrap();
            let best = neyman_loss(ps, inst.s0(), inst.s1()).unwrap();
            let c = regret_curvature(&inst);
            assert!(lo <= c && c <= hi);
            for i in -2000..=2000 {
                let d = radius * i as f64 / 2000.0;
                let excess = neyman_loss(ps + d, inst.s0(), inst.s1()).unwrap() - best;
                let slack = 1e-12 * best;
                assert!(lo * d * d <= excess + slack, "{name} d={d}");
                assert!(excess <= hi * d * d + slack, "{name} d={d}");
            }
        }
    }

    #[test]
    fn generic_over_f32() {
        let inst = ProblemInstance::<f32>::bernoulli(0.25, 0.25).unwrap();
        assert_eq!(regret_curvature(&inst), 4.0);
        assert_eq!(neyman_loss(0.5f32, 0.25, 0.25).unwrap(), 1.0);
    }
}
