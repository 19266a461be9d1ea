//! With gamma > 2 alpha = beta the finest level keeps two samples and a
//! fixed share of the variance, and the normalized estimator stays away
//! from N(0, 1).

use mlmc_clt::diagnostics::{failure_witness, WitnessCriteria};
use mlmc_clt::engine::run_experiment;
use mlmc_clt::families::{HeavyFailureFamily, LevelFamily};
use mlmc_clt::stats_tests::NormalityReport;

fn main() -> mlmc_clt::Result<()> {
    let family = HeavyFailureFamily::with_defaults();
    let targets: Vec<usize> = (8..=16).collect();
    let witness = failure_witness(&family, &targets, WitnessCriteria::default())?;
    println!(
        "{:>3} {:>10} {:>4} {:>7} {:>9} {:>7}",
        "L", "eps", "M_L", "share", "lindeberg", "KS"
    );
    for row in &witness.rows {
        let plan = family.plan(row.epsilon)?;
        let exp = run_experiment(&family, &plan, 2000, 1)?;
        let ks = NormalityReport::from_samples(&exp.normalized())?.ks_stat;
        println!(
            "{:>3} {:>10.4e} {:>4} {:>7.4} {:>9.4} {:>7.4}",
            row.target_level,
            row.epsilon,
            row.last_samples,
            row.last_share,
            row.lindeberg_total,
            ks
        );
    }
    println!("witnessed: {}", witness.witnessed);
    Ok(())
}
