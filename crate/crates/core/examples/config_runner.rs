//! Runs `plan`, `simulate` and `diagnose` for a JSON config, the same way
//! the binary does.
//!
//! ```text
//! cargo run --example config_runner -- crates/core/configs/partition.json /tmp/out
//! ```

use std::path::PathBuf;

use mlmc_clt::cli::{write_diagnostics, write_plan, write_simulation, ExperimentConfig};

fn main() -> mlmc_clt::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/configs/partition.json"
        ))
    });
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("mlmc-clt-example"));
    let config = ExperimentConfig::load(&config)?;
    write_plan(&config, &out, false)?;
    write_simulation(&config, &out, false)?;
    write_diagnostics(&config, &out)?;
    for f in [
        "plan.json",
        "samples.csv",
        "normality.json",
        "qq.csv",
        "diagnostics.json",
    ] {
        let len = std::fs::metadata(out.join(f))?.len();
        println!("{:>8} bytes  {}", len, out.join(f).display());
    }
    Ok(())
}
