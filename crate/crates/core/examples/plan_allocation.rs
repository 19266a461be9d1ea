//! Level count and per-level sample sizes for a hand-written schedule and
//! for a family's own schedule.

use mlmc_clt::families::{LevelFamily, PartitionFamily};
use mlmc_clt::rate_model::{
    level_sums, num_levels, variance_ratio, EstimatorPlan, LevelSchedule, RateTriplet,
};

fn main() -> mlmc_clt::Result<()> {
    let rates = RateTriplet::new(1.0, 1.0, 1.0, 1.0)?;
    println!("L(e^-3) = {}", num_levels((-3.0f64).exp(), &rates)?);

    let schedule = LevelSchedule::new(vec![1.0, 0.25], vec![1.0, 4.0])?;
    println!("S_k = {:?}", level_sums(&schedule));
    let plan = EstimatorPlan::from_schedule(0.1, schedule)?;
    println!(
        "eps = 0.1: M = {:?}, n = {}, Var A_ML = {:.6} <= eps^2 = 0.01",
        plan.samples(),
        plan.total_samples(),
        plan.predicted_variance()
    );

    let family = PartitionFamily::standard(0.5)?;
    println!("\npartition family, gamma = 1/2");
    println!(
        "{:>8} {:>3} {:>12} {:>14} {:>10}",
        "eps", "L", "n(eps)", "cost", "ratio"
    );
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let plan = family.plan(eps)?;
        println!(
            "{eps:>8.0e} {:>3} {:>12} {:>14.4e} {:>10.6}",
            plan.finest_level(),
            plan.total_samples(),
            plan.total_cost(),
            variance_ratio(&plan)
        );
    }
    Ok(())
}
