use crate::error::Result;
use crate::estimators::{aht_estimate, ipw_term, TrialTrace};
use crate::instances::{sample_outcome, Arm, ProblemInstance};
use crate::regret::{neyman_loss, neyman_regret, RegretLedger};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::strategies::AllocationStrategy;
use crate::Error;

/// Full record of one replication.
#[derive(Clone, Debug)]
pub struct Replication<T> {
    pub trace: TrialTrace<T>,
    pub ledger: RegretLedger<T>,
    /// Last round whose allocation differed from the strategy's unclipped
    /// proposal; 0 if the guard never bound.
    pub clip_exit_round: u64,
}

/// Streaming summary of one replication.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicationSummary<T> {
    /// Adaptive Horvitz-Thompson estimate at the horizon.
    pub estimate: T,
    pub regret: T,
    /// Cumulative regret after each requested checkpoint round.
    pub regret_at: Vec<T>,
    pub clip_exit_round: u64,
}

#[derive(Clone, Copy)]
struct Step<T> {
    t: u64,
    pi: T,
    arm: Arm,
    y: T,
}

/// Plays `horizon` rounds, feeding each round to `sink`. Returns the clip exit round.
fn drive<T, S, F>(
    inst: &ProblemInstance<T>,
    mut strategy: S,
    horizon: u64,
    rng: &mut RngStream,
    mut sink: F,
) -> Result<u64>
where
    T: Scalar,
    S: AllocationStrategy<T>,
    F: FnMut(Step<T>) -> Result<()>,
{
    let mut clip_exit = 0;
    for t in 1..=horizon {
        let pi = strategy.next_allocation();
        if strategy.proposal().is_some_and(|p| p != pi) {
            clip_exit = t;
        }
        let arm = if rng.bernoulli(pi.as_f64()) {
            Arm::Treatment
        } else {
            Arm::Control
        };
        let y = sample_outcome(inst, arm, rng);
        sink(Step { t, pi, arm, y })?;
        strategy.update(arm, y);
    }
    Ok(clip_exit)
}

/// Runs one replication and keeps the whole trace.
pub fn run_replication<T, S>(
    inst: &ProblemInstance<T>,
    strategy: S,
    horizon: u64,
    rng: &mut RngStream,
) -> Result<Replication<T>>
where
    T: Scalar,
    S: AllocationStrategy<T>,
{
    let mut trace = TrialTrace::with_capacity(horizon as usize);
    let clip_exit_round = drive(inst, strategy, horizon, rng, |s| {
        trace.push(s.pi, s.arm, s.y);
        Ok(())
    })?;
    let ledger = neyman_regret(&trace, inst)?;
    Ok(Replication {
        trace,
        ledger,
        clip_exit_round,
    })
}

/// Runs one replication keeping only the estimate, the regret (total and at
/// `checkpoints`), and the clip exit round.
///
/// Accumulation order matches [`run_replication`], so both paths agree bit for bit.
pub fn simulate<T, S>(
    inst: &ProblemInstance<T>,
    strategy: S,
    horizon: u64,
    rng: &mut RngStream,
    checkpoints: &[u64],
) -> Result<ReplicationSummary<T>>
where
    T: Scalar,
    S: AllocationStrategy<T>,
{
    let (s0, s1) = (inst.s0(), inst.s1());
    let optimal = neyman_loss(inst.pi_star()?, s0, s1)?;
    let mut ipw_sum = T::zero();
    let mut regret = T::zero();
    let mut regret_at = Vec::with_capacity(checkpoints.len());
    let mut next_checkpoint = checkpoints.iter().copied().peekable();
    let clip_exit_round = drive(inst, strategy, horizon, rng, |s| {
        if !(s.pi > T::zero() && s.pi < T::one()) {
            return Err(Error::NonpositivePropensity {
                round: s.t as usize,
                pi: s.pi.as_f64(),
            });
        }
        ipw_sum = ipw_sum + ipw_term(s.y, s.arm, s.pi);
        regret = regret + (neyman_loss(s.pi, s0, s1)? - optimal).max(T::zero());
        while next_checkpoint.next_if_eq(&s.t).is_some() {
            regret_at.push(regret);
        }
        Ok(())
    })?;
    if horizon == 0 {
        return Err(Error::EmptyTrace);
    }
    Ok(ReplicationSummary {
        estimate: ipw_sum / T::from_count(horizon),
        regret,
        regret_at,
        clip_exit_round,
    })
}

/// Trace-based summary; the reference path for [`simulate`].
impl<T: Scalar> Replication<T> {
    pub fn summary(&self) -> Result<ReplicationSummary<T>> {
        Ok(ReplicationSummary {
            estimate: aht_estimate(&self.trace)?,
            regret: self.ledger.regret(),
            regret_at: Vec::new(),
            clip_exit_round: self.clip_exit_round,
        })
    }
}
