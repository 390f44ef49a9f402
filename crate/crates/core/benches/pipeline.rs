use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rotset_core::analysis::{convexity_probe_with, star_shape_check_with};
use rotset_core::config::EngineConfig;
use rotset_core::exec::Parallelism;
use rotset_core::fixtures;
use rotset_core::pipeline::{CheckOptions, Engine};

const STRATEGIES: [(&str, Parallelism); 2] = [
    ("sequential", Parallelism::Sequential),
    ("parallel", Parallelism::Parallel),
];

fn config(par: Parallelism) -> EngineConfig {
    EngineConfig {
        parallelism: par,
        ..EngineConfig::default()
    }
}

fn compute(c: &mut Criterion) {
    let mut g = c.benchmark_group("compute");
    for name in ["genus2_blocks", "exp_family(3)"] {
        let model = fixtures::fixture(name).unwrap();
        for (label, par) in STRATEGIES {
            let engine = Engine::new(config(par));
            g.bench_with_input(BenchmarkId::new(label, name), &model, |b, m| {
                b.iter(|| engine.compute(m).unwrap())
            });
        }
    }
    g.finish();
}

fn check(c: &mut Criterion) {
    let mut g = c.benchmark_group("check");
    g.sample_size(10);
    let model = fixtures::genus2_blocks();
    let mut opts = CheckOptions::all(4);
    opts.oracle_samples = Some(200);
    for (label, par) in STRATEGIES {
        let engine = Engine::new(config(par));
        g.bench_function(label, |b| b.iter(|| engine.check(&model, &opts).unwrap()));
    }
    g.finish();
}

fn probes(c: &mut Criterion) {
    let model = fixtures::genus2_nonconvex();
    let union = Engine::new(EngineConfig::default())
        .analyze(&model)
        .unwrap()
        .chain_polytopes();
    let mut g = c.benchmark_group("probes");
    for (label, par) in STRATEGIES {
        g.bench_function(BenchmarkId::new("convexity_d6", label), |b| {
            b.iter(|| convexity_probe_with(&union, 6, usize::MAX, par).unwrap())
        });
        g.bench_function(BenchmarkId::new("star_shape", label), |b| {
            b.iter(|| star_shape_check_with(&union, par).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, compute, check, probes);
criterion_main!(benches);
