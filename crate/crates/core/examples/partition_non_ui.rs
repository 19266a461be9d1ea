//! The partition family is not uniformly integrable: the tail expectation
//! at a fixed truncation point climbs to 1 along the levels.

use mlmc_clt::diagnostics::ui_probe;
use mlmc_clt::families::{GaussianFamily, LevelFamily, PartitionFamily};

fn main() -> mlmc_clt::Result<()> {
    let partition = PartitionFamily::standard(0.5)?;
    let probe = ui_probe(&partition, 2.0, 40)?;
    println!("partition, x = 2: trend {:?}", probe.trend);
    for l in [0, 1, 2, 5, 10, 20, 40] {
        println!("  l = {l:>2}: E[Z 1(Z > 2)] = {:.12}", probe.values[l]);
    }
    println!(
        "  bias ratio per level = {:.15}",
        partition.bias(1) / partition.bias(0)
    );
    println!(
        "  V_40 e^20 = {:.15} (1 - 1/e = {:.15})",
        partition.delta_var(40) * 20f64.exp(),
        1.0 - (-1f64).exp()
    );

    let gaussian = GaussianFamily::new(1.0, 1.0, 1.0, 1.0, 0.5)?;
    let probe = ui_probe(&gaussian, 4.0, 40)?;
    println!(
        "\ngaussian, x = 4: trend {:?}, value {:.10} at every level",
        probe.trend, probe.values[0]
    );
    Ok(())
}
