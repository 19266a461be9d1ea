use mlmc_clt::engine::{
    level_stream, run_experiment, run_experiment_with_threads, MomentAccumulator,
};
use mlmc_clt::families::{GaussianFamily, LevelFamily, PartitionFamily};
use rand_distr::{Distribution, StandardNormal};

#[test]
fn estimator_is_unbiased_with_predicted_variance() {
    let f = PartitionFamily::standard(0.5).unwrap();
    let plan = f.plan(0.05).unwrap();
    let exp = run_experiment(&f, &plan, 4000, 3).unwrap();
    let n = exp.moments.count() as f64;
    // normalized values: mean 0, variance 1
    assert!(exp.moments.mean().abs() < 5.0 / n.sqrt());
    let var = exp.moments.variance().unwrap();
    assert!((var - 1.0).abs() < 5.0 * (2.0 / n).sqrt(), "{var}");
    let est_mean = exp.estimate_moments.mean();
    let se = (plan.predicted_variance() / n).sqrt();
    assert!((est_mean - f.fine_mean(plan.finest_level())).abs() < 5.0 * se);
}

#[test]
fn thread_count_does_not_change_results() {
    let f = GaussianFamily::new(1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
    let plan = f.plan(0.05).unwrap();
    let a = run_experiment_with_threads(&f, &plan, 700, 4, 1).unwrap();
    let b = run_experiment_with_threads(&f, &plan, 700, 4, 8).unwrap();
    let bits = |e: &mlmc_clt::engine::Experiment| -> Vec<u64> {
        e.normalized().iter().map(|z| z.to_bits()).collect()
    };
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(a.moments, b.moments);
}

#[test]
fn chunked_merge_matches_sequential() {
    let mut stream = level_stream(1, 0, 0);
    let xs: Vec<f64> = (0..100_000)
        .map(|_| StandardNormal.sample(&mut stream))
        .collect();
    let sequential: MomentAccumulator = xs.iter().copied().collect();
    let merged = xs
        .chunks(777)
        .map(|c| c.iter().copied().collect::<MomentAccumulator>())
        .fold(MomentAccumulator::new(), |acc, c| acc.merge(&c));
    assert_eq!(merged.count(), sequential.count());
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
    assert!(close(merged.mean(), sequential.mean()));
    assert!(close(merged.m2(), sequential.m2()));
    assert!(close(merged.m3(), sequential.m3()));
    assert!(close(merged.m4(), sequential.m4()));
}
