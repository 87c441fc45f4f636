use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use endfire::excitation::ArrayMode;
use endfire::de::Schedule;
use endfire::exec::Execution;
use endfire::params::Direction;
use endfire::performance::{self, Drive};
use endfire::reference::ReferenceData;
use endfire::workflows::{self, default_de_config, FeedPolicy};
use endfire::ModelParams;

fn bench_evaluate(c: &mut Criterion) {
    let p = ModelParams::default();
    let mut group = c.benchmark_group("evaluate");
    for n in [2, 5, 7] {
        let d = ReferenceData::bundled().parasitic_design(n).unwrap();
        let layout = d.layout(&p).unwrap();
        let drive = d.drive();
        group.bench_with_input(BenchmarkId::new("parasitic", n), &n, |b, _| {
            b.iter(|| black_box(performance::evaluate(&layout, &drive, &p, Direction::END_FIRE).unwrap()))
        });
        let active = Drive::Active { currents: None };
        group.bench_with_input(BenchmarkId::new("active", n), &n, |b, _| {
            b.iter(|| black_box(performance::evaluate(&layout, &active, &p, Direction::END_FIRE).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("candidate-sweep", n), &n, |b, _| {
            b.iter(|| {
                black_box(
                    workflows::parasitic_candidate(&layout, &p, FeedPolicy::Sweep, Direction::END_FIRE, true).unwrap(),
                )
            })
        });
    }
    group.finish();
}

// Same seed, same result; only the scheduling of candidate scoring differs.
fn bench_optimizer(c: &mut Criterion) {
    let p = ModelParams::default();
    let mut group = c.benchmark_group("optimize-parasitic");
    group.sample_size(10);
    for n in [3, 5, 7] {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let mut cfg = default_de_config(n, ArrayMode::Parasitic, 1);
            cfg.generations = 20;
            cfg.schedule = Schedule::Generational;
            cfg.execution = exec;
            let name = format!("{exec:?}").to_lowercase();
            group.bench_with_input(BenchmarkId::new(name, n), &cfg, |b, cfg| {
                b.iter(|| black_box(workflows::optimize_parasitic(n, &p, cfg, FeedPolicy::Sweep).unwrap()))
            });
        }
    }
    group.finish();
}

fn bench_multi_seed(c: &mut Criterion) {
    let p = ModelParams::default();
    let mut group = c.benchmark_group("multi-seed");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let name = format!("{exec:?}").to_lowercase();
        group.bench_function(BenchmarkId::new(name, 4), |b| {
            b.iter(|| {
                let runs = endfire::exec::map_indices(exec, 5, |seed| {
                    let mut cfg = default_de_config(4, ArrayMode::Parasitic, seed as u64);
                    cfg.execution = Execution::Sequential;
                    workflows::optimize_parasitic(4, &p, &cfg, FeedPolicy::Sweep)
                        .unwrap()
                        .realized_gain_dbi()
                });
                black_box(runs)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_evaluate, bench_optimizer, bench_multi_seed);
criterion_main!(benches);
