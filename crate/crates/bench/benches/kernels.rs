use std::hint::black_box;

use chaosde_core::benchmarks::{make_instance, BenchmarkId};
use chaosde_core::chaos::ChaoticMapKind;
use chaosde_core::de::{run_de, DeConfig, Variant};
use chaosde_core::normalize::Scheme;
use chaosde_core::source::{
    build_empirical_distribution, ChaoticSource, EmpiricalDistribution, MatchedSource, Mt19937, MtSource, RandomSource,
};
use chaosde_core::stats::{anova_oneway, ks_normality, StatConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId as Id, Criterion, Throughput};

fn sources(c: &mut Criterion) {
    let mut g = c.benchmark_group("source_10k_draws");
    g.throughput(Throughput::Elements(10_000));
    let draw = |src: &mut dyn RandomSource| {
        let mut acc = 0.0;
        for _ in 0..10_000 {
            acc += src.next_unit().unwrap().get();
        }
        acc
    };
    g.bench_function("mt19937", |b| {
        let mut src = MtSource::new(5489);
        b.iter(|| black_box(draw(&mut src)))
    });
    for map in [ChaoticMapKind::Gingerbread, ChaoticMapKind::tinkerbell()] {
        for scheme in Scheme::ALL {
            g.bench_function(Id::new(map.name(), scheme), |b| {
                let mut src = ChaoticSource::with_scheme(map, map.default_initial_point(), scheme).unwrap();
                b.iter(|| black_box(draw(&mut src)))
            });
        }
    }
    let mut chaos = ChaoticSource::with_scheme(ChaoticMapKind::tinkerbell(), ChaoticMapKind::tinkerbell().default_initial_point(), Scheme::Atan2).unwrap();
    let dist: EmpiricalDistribution = build_empirical_distribution(&mut chaos, 100_000, 1024).unwrap();
    g.bench_function("matched", |b| {
        let mut src = MatchedSource::new(dist.clone(), Mt19937::new(1));
        b.iter(|| black_box(draw(&mut src)))
    });
    g.finish();
}

fn functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("evaluate_d30");
    let mut mt = Mt19937::new(3);
    let x: Vec<f64> = (0..30).map(|_| mt.next_f64() * 200.0 - 100.0).collect();
    for id in BenchmarkId::ALL {
        let inst = make_instance(id, 30, 0).unwrap();
        g.bench_function(id.to_string(), |b| b.iter(|| black_box(inst.evaluate(black_box(&x)).unwrap())));
    }
    g.finish();
}

fn de(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_de");
    g.sample_size(10);
    let inst = make_instance(BenchmarkId::F1, 10, 0).unwrap();
    for variant in [Variant::Rand1Bin, Variant::Best1Bin] {
        let mut cfg = DeConfig::standard(variant, 10);
        cfg.generations = 50;
        g.bench_function(variant.to_string(), |b| {
            b.iter(|| {
                let mut src = MtSource::new(11);
                black_box(run_de(&cfg, &mut src, &inst).unwrap())
            })
        });
    }
    g.finish();
}

fn statistics(c: &mut Criterion) {
    let mut mt = Mt19937::new(8);
    let groups: Vec<Vec<f64>> = (0..3).map(|_| (0..50).map(|_| mt.next_f64()).collect()).collect();
    let cfg = StatConfig::default();
    c.bench_function("anova_3x50", |b| b.iter(|| black_box(anova_oneway(&groups, &cfg).unwrap())));
    c.bench_function("ks_normality_50", |b| b.iter(|| black_box(ks_normality(&groups[0], &cfg).unwrap())));
}

criterion_group!(benches, sources, functions, de, statistics);
criterion_main!(benches);
