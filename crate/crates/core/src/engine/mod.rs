//! Replications of the MLMC estimator
//! `A_ML = sum_l (1/M_l) sum_{i <= M_l} Delta_l X^i` and their normalization
//! `(A_ML - E[X_L]) / sqrt(Var A_ML)`.
//!
//! Normalization uses the family's exact `E[X_L]` and the plan's exact
//! `Var A_ML = sum_l V_l / M_l`. Replication `r` draws level `l` from
//! [`level_stream`]`(seed, r, l)`, so results do not depend on scheduling or
//! thread count.

mod accumulator;
mod stream;

pub use accumulator::{merge_accumulators, MomentAccumulator};
pub use stream::level_stream;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::LevelFamily;
use crate::numeric::CompensatedSum;
use crate::rate_model::EstimatorPlan;

/// Replications are folded into accumulators in fixed-size chunks that are
/// merged in index order, independent of the thread count.
const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicationResult {
    pub replication_index: u64,
    pub seed: u64,
    /// Realized `A_ML`.
    pub estimate: f64,
    /// `(A_ML - E[X_L]) / sqrt(Var A_ML)`, with `0/0 = 0` for degenerate plans.
    pub normalized: f64,
    /// `sum_l M_l C_l`.
    pub total_cost: f64,
}

/// Outcome of `R` independent replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Experiment {
    pub seed: u64,
    pub replications: Vec<ReplicationResult>,
    /// Moments of the normalized values.
    pub moments: MomentAccumulator,
    /// Moments of the raw estimates.
    pub estimate_moments: MomentAccumulator,
    pub fine_mean: f64,
    pub predicted_variance: f64,
    /// Set when the plan's predicted variance is zero; normalized values are
    /// then all zero by the `0/0 = 0` convention.
    pub degenerate: bool,
}

impl Experiment {
    pub fn normalized(&self) -> Vec<f64> {
        self.replications.iter().map(|r| r.normalized).collect()
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.replications.iter().map(|r| r.estimate).collect()
    }
}

/// Checks that `plan` was built from `family`'s schedule.
pub fn check_plan<F: LevelFamily + ?Sized>(family: &F, plan: &EstimatorPlan) -> Result<()> {
    family.check_depth(plan.finest_level())?;
    let schedule = plan.schedule();
    for (level, (&v, &c)) in schedule
        .variances()
        .iter()
        .zip(schedule.costs())
        .enumerate()
    {
        let fv = family.delta_var(level);
        let fc = family.cost(level);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        if !close(v, fv) || !close(c, fc) {
            return Err(Error::PlanMismatch(format!(
                "level {level}: plan has (V, C) = ({v}, {c}), family {} has ({fv}, {fc})",
                family.name()
            )));
        }
    }
    Ok(())
}

/// One replication of the estimator, deterministic in `(seed, index)`.
pub fn run_replication<F: LevelFamily + ?Sized>(
    family: &F,
    plan: &EstimatorPlan,
    seed: u64,
    index: u64,
) -> Result<ReplicationResult> {
    check_plan(family, plan)?;
    let fine_mean = family.fine_mean(plan.finest_level());
    Ok(replicate(family, plan, seed, index, fine_mean))
}

fn replicate<F: LevelFamily + ?Sized>(
    family: &F,
    plan: &EstimatorPlan,
    seed: u64,
    index: u64,
    fine_mean: f64,
) -> ReplicationResult {
    let mut estimate = CompensatedSum::new();
    for (level, &m) in plan.samples().iter().enumerate() {
        let mut stream = level_stream(seed, index, level);
        estimate.add(family.sample_level_sum(level, m, &mut stream) / m as f64);
    }
    let estimate = estimate.value();
    let variance = plan.predicted_variance();
    let normalized = if variance == 0.0 {
        0.0
    } else {
        (estimate - fine_mean) / variance.sqrt()
    };
    ReplicationResult {
        replication_index: index,
        seed,
        estimate,
        normalized,
        total_cost: plan.total_cost(),
    }
}

/// `replications` independent runs on the current rayon pool.
pub fn run_experiment<F: LevelFamily + ?Sized>(
    family: &F,
    plan: &EstimatorPlan,
    replications: usize,
    seed: u64,
) -> Result<Experiment> {
    if replications == 0 {
        return Err(Error::Config("at least one replication is required".into()));
    }
    check_plan(family, plan)?;
    let fine_mean = family.fine_mean(plan.finest_level());
    let results: Vec<ReplicationResult> = (0..replications as u64)
        .into_par_iter()
        .map(|i| replicate(family, plan, seed, i, fine_mean))
        .collect();
    let fold = |pick: fn(&ReplicationResult) -> f64| {
        results
            .par_chunks(CHUNK)
            .map(|chunk| chunk.iter().map(pick).collect::<MomentAccumulator>())
            .collect::<Vec<_>>()
            .iter()
            .fold(MomentAccumulator::new(), |acc, c| acc.merge(c))
    };
    let moments = fold(|r| r.normalized);
    let estimate_moments = fold(|r| r.estimate);
    Ok(Experiment {
        seed,
        moments,
        estimate_moments,
        fine_mean,
        predicted_variance: plan.predicted_variance(),
        degenerate: plan.is_degenerate(),
        replications: results,
    })
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads<F: LevelFamily + ?Sized>(
    family: &F,
    plan: &EstimatorPlan,
    replications: usize,
    seed: u64,
    threads: usize,
) -> Result<Experiment> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(family, plan, replications, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{ConstantFamily, GaussianFamily};
    use crate::rate_model::{LevelSchedule, RateTriplet};

    fn gaussian() -> GaussianFamily {
        GaussianFamily::new(1.0, 1.0, 1.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn replication_is_deterministic() {
        let f = gaussian();
        let plan = f.plan(0.1).unwrap();
        let a = run_replication(&f, &plan, 42, 7).unwrap();
        let b = run_replication(&f, &plan, 42, 7).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        let c = run_replication(&f, &plan, 42, 8).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn constant_family_is_exact() {
        let rates = RateTriplet::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let f = ConstantFamily::new(vec![0.5, 0.25, 0.125, 0.0625], rates).unwrap();
        let plan = f.plan(0.1).unwrap();
        assert_eq!(plan.finest_level(), 3);
        assert!(plan.samples().iter().all(|&m| m == 1));
        let r = run_replication(&f, &plan, 1, 0).unwrap();
        assert_eq!(r.estimate, 0.9375);
        assert_eq!(r.normalized, 0.0);

        let exp = run_experiment(&f, &plan, 5, 1).unwrap();
        assert!(exp.degenerate);
        assert!(exp.normalized().iter().all(|&z| z == 0.0));
    }

    #[test]
    fn single_replication_has_zero_m2() {
        let f = gaussian();
        let plan = f.plan(0.2).unwrap();
        let exp = run_experiment(&f, &plan, 1, 3).unwrap();
        assert_eq!(exp.moments.count(), 1);
        assert_eq!(exp.moments.m2(), 0.0);
    }

    #[test]
    fn mismatched_plan_is_rejected() {
        let f = gaussian();
        let s = LevelSchedule::new(vec![2.0, 1.0], vec![1.0, 1.0]).unwrap();
        let plan = EstimatorPlan::from_schedule(0.1, s).unwrap();
        assert!(matches!(
            run_replication(&f, &plan, 0, 0),
            Err(Error::PlanMismatch(_))
        ));

        let rates = RateTriplet::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let short = ConstantFamily::new(vec![1.0], rates).unwrap();
        assert!(short.plan(0.01).is_err());
    }

    #[test]
    fn zero_replications_rejected() {
        let f = gaussian();
        let plan = f.plan(0.2).unwrap();
        assert!(run_experiment(&f, &plan, 0, 1).is_err());
    }

    #[test]
    fn total_cost_is_constant() {
        let f = gaussian();
        let plan = f.plan(0.1).unwrap();
        let exp = run_experiment(&f, &plan, 20, 9).unwrap();
        let expected: f64 = plan
            .samples()
            .iter()
            .enumerate()
            .map(|(l, &m)| m as f64 * f.cost(l))
            .sum();
        for r in &exp.replications {
            assert_eq!(r.total_cost, exp.replications[0].total_cost);
            assert!((r.total_cost - expected).abs() <= 1e-12 * expected);
        }
    }
}
