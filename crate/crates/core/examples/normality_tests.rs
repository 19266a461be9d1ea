//! KS distance, moments and QQ points on a small sample.

use mlmc_clt::engine::level_stream;
use mlmc_clt::stats_tests::{
    ks_statistic, qq_points, sample_moments, std_normal_cdf, std_normal_quantile,
};
use rand_distr::{Distribution, Exp1, StandardNormal};

fn main() -> mlmc_clt::Result<()> {
    println!("Phi(1.96) = {:.15}", std_normal_cdf(1.96));
    println!("Phi^-1(0.975) = {:.15}", std_normal_quantile(0.975)?);

    let mut stream = level_stream(3, 0, 0);
    let normal: Vec<f64> = (0..1000)
        .map(|_| StandardNormal.sample(&mut stream))
        .collect();
    let skewed: Vec<f64> = (0..1000)
        .map(|_| Distribution::<f64>::sample(&Exp1, &mut stream) - 1.0)
        .collect();
    for (name, xs) in [("normal", &normal), ("exponential - 1", &skewed)] {
        let m = sample_moments(xs)?;
        println!(
            "{name:<16} KS {:.4} (5% crit {:.4}), skew {:+.3}, kurt {:+.3}",
            ks_statistic(xs)?,
            1.3581 / (xs.len() as f64).sqrt(),
            m.skewness.unwrap_or(f64::NAN),
            m.excess_kurtosis.unwrap_or(f64::NAN)
        );
    }
    let qq = qq_points(&skewed)?;
    println!("qq tail of skewed sample: {:?}", &qq[qq.len() - 3..]);
    Ok(())
}
