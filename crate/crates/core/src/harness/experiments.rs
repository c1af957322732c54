use rayon::prelude::*;

use super::config::{validate_alphas, ExperimentConfig};
use super::simulate::{simulate, ReplicationSummary};
use super::stats::{mean, quantiles, sample_variance};
use crate::error::{Error, Result};
use crate::estimators::ht_fixed_variance;
use crate::instances::ProblemInstance;
use crate::regret::neyman_loss;
use crate::rng::{stream_id, RngStream};
use crate::strategies::{ClipSmt, StrategyKind, StrategySpec};
use crate::theory::predict_clip_phase;

const COMPARE_TAG: u64 = 1;
const CLIP_TAG: u64 = 2;

/// One (instance, strategy, horizon) cell of the variance comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonCell {
    pub instance: String,
    pub strategy: String,
    pub horizon: u64,
    /// Variance of the ATE estimate: across-replication sample variance for
    /// simulated designs, closed form for the reference designs.
    pub variance: f64,
    pub mean_estimate: f64,
    pub mean_regret: f64,
    pub regret_q05: f64,
    pub regret_q50: f64,
    pub regret_q95: f64,
}

/// Empirical versus predicted clipping-phase length for one (instance, alpha).
#[derive(Clone, Debug, PartialEq)]
pub struct ClipRow {
    pub instance: String,
    pub alpha: f64,
    /// Rounds simulated per replication.
    pub horizon: u64,
    /// 0.95-quantile of the last round at which the guard bound. Equal to
    /// `horizon` when the quantile is censored.
    pub empirical_q95: f64,
    pub predicted: f64,
    /// `predicted / max(empirical_q95, 1)`; NaN when the prediction is invalid.
    pub ratio: f64,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictionRow {
    pub instance: String,
    pub alpha: f64,
    pub t_lower: f64,
    pub t_upper: f64,
    pub t_clip: f64,
    pub valid: bool,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentResult {
    pub cells: Vec<ComparisonCell>,
    pub clip_rows: Vec<ClipRow>,
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<R, F>(workers: Option<usize>, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn replicate<F>(replications: u64, run: F) -> Result<Vec<ReplicationSummary<f64>>>
where
    F: Fn(u64) -> Result<ReplicationSummary<f64>> + Sync + Send,
{
    (0..replications).into_par_iter().map(run).collect()
}

fn reference_cell(
    name: &str,
    spec: &StrategySpec,
    inst: &ProblemInstance<f64>,
    horizon: u64,
) -> Result<ComparisonCell> {
    let pi_star = inst.pi_star()?;
    let pi = match spec.kind {
        StrategyKind::NeymanOracle => pi_star,
        _ => 0.5,
    };
    let optimal = neyman_loss(pi_star, inst.s0(), inst.s1())?;
    let regret = if pi == pi_star {
        0.0
    } else {
        horizon as f64 * (neyman_loss(pi, inst.s0(), inst.s1())? - optimal).max(0.0)
    };
    Ok(ComparisonCell {
        instance: name.to_string(),
        strategy: spec.id(),
        horizon,
        variance: ht_fixed_variance(inst, pi, horizon),
        mean_estimate: inst.tau(),
        mean_regret: regret,
        regret_q05: regret,
        regret_q50: regret,
        regret_q95: regret,
    })
}

/// Variance of the ATE estimate for every (instance, strategy, horizon).
///
/// Adaptive and `fixed` designs are simulated; `neyman-oracle` and `balanced`
/// use the closed-form fixed-allocation variance.
pub fn variance_comparison(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let kinds: Vec<_> = cfg.strategies.iter().map(|s| s.kind).collect();
    if !kinds.iter().any(StrategyKind::is_adaptive)
        || !kinds.contains(&StrategyKind::NeymanOracle)
        || !kinds.contains(&StrategyKind::Balanced)
    {
        return Err(Error::Config(
            "comparison needs an adaptive strategy plus neyman-oracle and balanced".into(),
        ));
    }
    let instances = cfg.problem_instances()?;
    let mut cells = Vec::new();
    for (i, (name, inst)) in instances.iter().enumerate() {
        for (s, spec) in cfg.strategies.iter().enumerate() {
            for &horizon in &cfg.horizons {
                if spec.kind.is_reference_design() {
                    cells.push(reference_cell(name, spec, inst, horizon)?);
                    continue;
                }
                let runs = replicate(cfg.replications, |r| {
                    let mut rng = RngStream::new(cfg.seed, stream_id(&[COMPARE_TAG, i as u64, s as u64, horizon, r]));
                    simulate(inst, spec.build(inst, horizon)?, horizon, &mut rng, &[])
                })
                .map_err(|e| Error::Config(format!("{name}/{}/T={horizon}: {e}", spec.id())))?;
                let estimates: Vec<f64> = runs.iter().map(|x| x.estimate).collect();
                let regrets: Vec<f64> = runs.iter().map(|x| x.regret).collect();
                let q = quantiles(&regrets, &[0.05, 0.5, 0.95]);
                cells.push(ComparisonCell {
                    instance: name.clone(),
                    strategy: spec.id(),
                    horizon,
                    variance: if estimates.len() > 1 {
                        sample_variance(&estimates)
                    } else {
                        0.0
                    },
                    mean_estimate: mean(&estimates),
                    mean_regret: mean(&regrets),
                    regret_q05: q[0],
                    regret_q50: q[1],
                    regret_q95: q[2],
                });
            }
        }
    }
    Ok(ExperimentResult {
        cells,
        clip_rows: Vec::new(),
    })
}

/// Empirical 0.95-quantile of the clipping-phase end against the theoretical
/// prediction, for each instance and guard exponent.
pub fn clip_time_experiment(cfg: &ExperimentConfig, alphas: &[f64]) -> Result<ExperimentResult> {
    cfg.validate()?;
    validate_alphas(alphas)?;
    let horizon = cfg.clip_horizon();
    let instances = cfg.problem_instances()?;
    let mut rows = Vec::new();
    for (i, (name, inst)) in instances.iter().enumerate() {
        for &alpha in alphas {
            let runs = replicate(cfg.replications, |r| {
                let mut rng = RngStream::new(cfg.seed, stream_id(&[CLIP_TAG, i as u64, alpha.to_bits(), r]));
                simulate(inst, ClipSmt::new(alpha), horizon, &mut rng, &[])
            })?;
            let exits: Vec<f64> = runs.iter().map(|x| x.clip_exit_round as f64).collect();
            let empirical_q95 = quantiles(&exits, &[0.95])[0];
            let prediction = predict_clip_phase(inst, alpha, cfg.delta);
            let ratio = if prediction.valid {
                prediction.t_clip / empirical_q95.max(1.0)
            } else {
                f64::NAN
            };
            rows.push(ClipRow {
                instance: name.clone(),
                alpha,
                horizon,
                empirical_q95,
                predicted: prediction.t_clip,
                ratio,
                valid: prediction.valid,
            });
        }
    }
    Ok(ExperimentResult {
        cells: Vec::new(),
        clip_rows: rows,
    })
}

/// Theoretical clipping-phase bounds for every configured instance.
pub fn predict_clip_rows(cfg: &ExperimentConfig, alpha: f64) -> Result<Vec<PredictionRow>> {
    Ok(cfg
        .problem_instances()?
        .into_iter()
        .map(|(name, inst)| {
            let p = predict_clip_phase(&inst, alpha, cfg.delta);
            PredictionRow {
                instance: name,
                alpha,
                t_lower: p.t_lower,
                t_upper: p.t_upper,
                t_clip: p.t_clip,
                valid: p.valid,
                reasons: p.reasons,
            }
        })
        .collect())
}
