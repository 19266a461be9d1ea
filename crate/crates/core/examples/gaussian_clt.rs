//! Replicate the estimator and compare its normalization with N(0, 1).

use mlmc_clt::engine::run_experiment;
use mlmc_clt::families::{GaussianFamily, LevelFamily, PartitionFamily};
use mlmc_clt::stats_tests::NormalityReport;

fn report(family: &dyn LevelFamily, eps: f64, replications: usize) -> mlmc_clt::Result<()> {
    let plan = family.plan(eps)?;
    let exp = run_experiment(family, &plan, replications, 1)?;
    let r = NormalityReport::from_samples(&exp.normalized())?;
    println!(
        "{:<10} eps {eps}: L = {}, n = {}, KS = {:.4} (crit {:.4}, pass {}), mean {:+.4}, var {:.4}, kurt {:+.4}",
        family.name(),
        plan.finest_level(),
        plan.total_samples(),
        r.ks_stat,
        r.ks_critical_5pct,
        r.pass_5pct,
        r.mean,
        r.variance.unwrap_or(f64::NAN),
        r.excess_kurtosis.unwrap_or(f64::NAN)
    );
    Ok(())
}

fn main() -> mlmc_clt::Result<()> {
    report(&GaussianFamily::new(1.0, 1.0, 1.0, 1.0, 0.5)?, 0.02, 2000)?;
    report(&PartitionFamily::standard(0.5)?, 0.02, 2000)
}
