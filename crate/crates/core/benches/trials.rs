use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_mab::env::{preset, AttackSpec, AttackStrategy};
use robust_mab::estimators::ArmStats;
use robust_mab::harness::run_experiment;
use robust_mab::{Execution, PolicyConfig};

fn experiment(c: &mut Criterion) {
    let scenario = preset("paper-k10")
        .unwrap()
        .with_attack(AttackSpec {
            rho: 0.125,
            strategy: AttackStrategy::TargetedUniform { magnitude: 1800.0 },
        })
        .unwrap()
        .with_horizon(10_000)
        .unwrap();
    let policies: Vec<PolicyConfig> = ["med-e-ucb", "med-eps-greedy", "ucb"]
        .iter()
        .map(|t| PolicyConfig::from_tag(t).unwrap())
        .collect();
    let mut group = c.benchmark_group("run_experiment_8_trials");
    group.sample_size(10);
    for (name, exec) in [("serial", Execution::Serial), ("parallel", Execution::Parallel)] {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_experiment(&scenario, &policies, 8, 42, exec).unwrap())
        });
    }
    group.finish();
}

fn estimators(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xs: Vec<f64> = (0..10_000).map(|_| rng.random_range(-1e3..1e3)).collect();
    c.bench_function("arm_stats_insert_median_10k", |b| {
        b.iter(|| {
            let mut s = ArmStats::new();
            let mut acc = 0.0;
            for &x in &xs {
                s.insert(x).unwrap();
                acc += s.median().unwrap();
            }
            acc
        })
    });
}

criterion_group!(benches, experiment, estimators);
criterion_main!(benches);
