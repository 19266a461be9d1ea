//! Lindeberg sums along a tolerance grid and the limit-condition terms.

use mlmc_clt::diagnostics::{lim_cond_term, lindeberg_sum};
use mlmc_clt::families::{GaussianFamily, HeavyFailureFamily, LevelFamily, PartitionFamily};

fn main() -> mlmc_clt::Result<()> {
    let families: Vec<Box<dyn LevelFamily>> = vec![
        Box::new(GaussianFamily::new(1.0, 1.0, 1.0, 1.0, 0.5)?),
        Box::new(PartitionFamily::standard(0.5)?),
        Box::new(HeavyFailureFamily::with_defaults()),
    ];
    let grid = [1.0, 0.3, 1e-1, 3e-2, 1e-2, 1e-3];
    for f in &families {
        println!("{}", f.name());
        for nu in [0.05, 0.25, 1.0, 4.0] {
            let totals = grid
                .iter()
                .map(|&eps| Ok(lindeberg_sum(f.as_ref(), &f.plan(eps)?, nu)?.total))
                .collect::<mlmc_clt::Result<Vec<_>>>()?;
            let row: Vec<String> = totals.iter().map(|t| format!("{t:9.3e}")).collect();
            println!("  nu = {nu:<5} {}", row.join(" "));
        }
        let terms = [5, 10, 20, 40]
            .iter()
            .map(|&l| lim_cond_term(f.as_ref(), l, 1.0))
            .collect::<mlmc_clt::Result<Vec<_>>>()?;
        println!("  limit-condition terms at l = 5, 10, 20, 40 (nu = 1): {terms:.4?}");
    }
    Ok(())
}
