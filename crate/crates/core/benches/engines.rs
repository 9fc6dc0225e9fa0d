use bunkbed::engines::{
    exact_enumeration, half, monte_carlo, posts_exactly_model, EdgeModel, EnumOptions, ExecPolicy, McOptions,
};
use bunkbed::events::Event;
use bunkbed::graph::{build_g1, bunkbed};
use bunkbed::suite::sweep_rows;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const POLICIES: [(&str, ExecPolicy); 2] = [
    ("sequential", ExecPolicy::Sequential),
    ("parallel", ExecPolicy::Parallel),
];

fn enumeration(c: &mut Criterion) {
    let bb = bunkbed(&build_g1());
    let model = posts_exactly_model(&bb, &["2", "5", "8"], half()).unwrap();
    let events = [Event::reach("1-", "9-"), Event::reach("1-", "9+")];
    let mut group = c.benchmark_group("enumerate_g1_posts_exactly");
    group.sample_size(10);
    for (name, policy) in POLICIES {
        let opts = EnumOptions {
            policy,
            ..Default::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exact_enumeration(&bb, &model, &events, opts).unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let bb = bunkbed(&build_g1());
    let model = EdgeModel::uniform(&bb, half()).unwrap();
    let events = [Event::reach("1-", "9-"), Event::reach("1-", "9+")];
    let mut group = c.benchmark_group("monte_carlo_g1_200k");
    group.sample_size(10);
    for (name, policy) in POLICIES {
        let opts = McOptions {
            policy,
            ..Default::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| monte_carlo(&bb, &model, &events, 200_000, 7, opts).unwrap())
        });
    }
    group.finish();
}

fn gadget_sweep(c: &mut Criterion) {
    let ks: Vec<usize> = (1..=40).collect();
    // Warm the shared G1 caches so only the sweep is timed.
    sweep_rows(&[1], ExecPolicy::Sequential).unwrap();
    let mut group = c.benchmark_group("dp_sweep_k1_to_40");
    group.sample_size(10);
    for (name, policy) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sweep_rows(&ks, policy).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, sampling, gadget_sweep);
criterion_main!(benches);
