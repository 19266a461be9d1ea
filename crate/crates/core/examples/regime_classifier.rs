//! Which central limit statement applies to a rate triplet.

use mlmc_clt::families::{GaussianFamily, HeavyFailureFamily, LevelFamily, PartitionFamily};
use mlmc_clt::rate_model::{classify_regime, TailDescriptor};

fn main() -> mlmc_clt::Result<()> {
    let unknown = TailDescriptor::default();
    for (alpha, beta, gamma) in [
        (1.0, 1.5, 1.0),
        (1.0, 2.0, 3.0),
        (0.1, 1.0, 1.0),
        (1.0, 1.0, 1.5),
    ] {
        let regime = classify_regime(alpha, beta, gamma, &unknown);
        println!(
            "({alpha}, {beta}, {gamma}) -> {:?}, clt {:?}",
            regime.kind, regime.clt_holds
        );
    }

    // built-in families know their own tail behaviour
    let families: Vec<Box<dyn LevelFamily>> = vec![
        Box::new(PartitionFamily::standard(0.25)?),
        Box::new(PartitionFamily::standard(0.5)?),
        Box::new(PartitionFamily::standard(1.0)?),
        Box::new(GaussianFamily::new(1.0, 1.0, 1.0, 1.0, 0.5)?),
        Box::new(HeavyFailureFamily::with_defaults()),
    ];
    for f in &families {
        let r = f.rates();
        let regime = r.regime(&f.tail_descriptor());
        println!(
            "\n{} (alpha {}, beta {}, gamma {}): {:?}, clt {:?}",
            f.name(),
            r.alpha(),
            r.beta(),
            r.gamma(),
            regime.kind,
            regime.clt_holds
        );
        for c in &regime.conditions {
            println!("  [{:?}] {}", c.holds, c.description);
        }
    }
    Ok(())
}
