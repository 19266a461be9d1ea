//! Monte Carlo checks of each family's exact moments and tails.

use mlmc_clt::engine::level_stream;
use mlmc_clt::families::{
    gaussian_lindeberg_tail, GaussianFamily, HeavyFailureFamily, LevelFamily, PartitionFamily,
};

const DRAWS: u64 = 1_000_000;

/// Sample mean and variance of `DRAWS` increments at `level`.
fn sample_stats(family: &dyn LevelFamily, level: usize, seed: u64) -> (f64, f64) {
    let mut stream = level_stream(seed, 0, level);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let shift = family.delta_mean(level);
    for _ in 0..DRAWS {
        let d = family.sample_delta(level, &mut stream) - shift;
        sum += d;
        sum_sq += d * d;
    }
    let n = DRAWS as f64;
    let mean = sum / n;
    (shift + mean, (sum_sq - n * mean * mean) / (n - 1.0))
}

/// Fourth central moment, for the standard error of a sample variance.
fn fourth_moment(family: &dyn LevelFamily, level: usize, seed: u64) -> f64 {
    let mut stream = level_stream(seed ^ 0xabcd, 0, level);
    let mu = family.delta_mean(level);
    (0..DRAWS)
        .map(|_| (family.sample_delta(level, &mut stream) - mu).powi(4))
        .sum::<f64>()
        / DRAWS as f64
}

fn check_family(family: &dyn LevelFamily, mean_levels: &[usize], var_levels: &[usize]) {
    let n = DRAWS as f64;
    for &l in mean_levels {
        let (mean, _) = sample_stats(family, l, 11);
        let se = (family.delta_var(l) / n).sqrt();
        assert!(
            (mean - family.delta_mean(l)).abs() <= 5.0 * se,
            "{} level {l}: mean {mean} vs {}",
            family.name(),
            family.delta_mean(l)
        );
    }
    for &l in var_levels {
        let (_, var) = sample_stats(family, l, 12);
        let v = family.delta_var(l);
        let se = ((fourth_moment(family, l, 12) - v * v).max(0.0) / n).sqrt();
        assert!(
            (var - v).abs() <= 5.0 * se.max(1e-3 * v),
            "{} level {l}: variance {var} vs {v}",
            family.name()
        );
    }
}

#[test]
fn partition_moments() {
    let f = PartitionFamily::standard(0.5).unwrap();
    check_family(&f, &[0, 1, 5, 10, 20, 40], &[0, 1, 3, 5]);
}

#[test]
fn gaussian_moments() {
    let f = GaussianFamily::new(1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
    check_family(&f, &[0, 1, 5, 10, 20, 40], &[0, 1, 5, 10, 20, 40]);
}

#[test]
fn heavy_moments() {
    let f = HeavyFailureFamily::with_defaults();
    check_family(&f, &[0, 1, 5, 10, 20, 40], &[0, 1, 2, 3]);
}

#[test]
fn heavy_level_sums_follow_binomial_law() {
    let f = HeavyFailureFamily::with_defaults();
    for level in [0, 2, 4] {
        let count = 1000u64;
        let reps = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for r in 0..reps {
            let s = f.sample_level_sum(level, count, &mut level_stream(5, r, level));
            sum += s;
            sum_sq += s * s;
        }
        let n = reps as f64;
        let mean = sum / n;
        let var = sum_sq / n - mean * mean;
        let expected = count as f64 * f.delta_var(level);
        assert!(mean.abs() <= 5.0 * (expected / n).sqrt());
        assert!(
            (var / expected - 1.0).abs() < 0.05,
            "level {level}: {var} vs {expected}"
        );
    }
}

#[test]
fn gaussian_empirical_tail() {
    let f = GaussianFamily::new(1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
    let t = 3.8416;
    let level = 3;
    let (mu, v) = (f.delta_mean(level), f.delta_var(level));
    let mut stream = level_stream(99, 0, level);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..DRAWS {
        let d = f.sample_delta(level, &mut stream) - mu;
        let z = d * d / v;
        let y = if z > t { z } else { 0.0 };
        sum += y;
        sum_sq += y * y;
    }
    let n = DRAWS as f64;
    let est = sum / n;
    let se = ((sum_sq / n - est * est) / n).sqrt();
    let exact = gaussian_lindeberg_tail(t);
    assert!((exact - 0.2790842920835706).abs() < 1e-12);
    assert!(
        (est - exact).abs() <= 5.0 * se,
        "{est} vs {exact} (se {se})"
    );
}

#[test]
fn partition_tail_matches_sampling() {
    let f = PartitionFamily::standard(0.5).unwrap();
    for (level, t) in [(0, 1.0), (1, 1.0), (2, 0.5), (4, 10.0)] {
        let (mu, v) = (f.delta_mean(level), f.delta_var(level));
        let mut stream = level_stream(7, 1, level);
        let mut sum = 0.0;
        for _ in 0..DRAWS {
            let d = f.sample_delta(level, &mut stream) - mu;
            let z = d * d / v;
            if z > t {
                sum += z;
            }
        }
        let est = sum / DRAWS as f64;
        let exact = f.lindeberg_tail(level, t).unwrap();
        assert!(
            (est - exact).abs() < 0.02,
            "level {level}: {est} vs {exact}"
        );
    }
}
