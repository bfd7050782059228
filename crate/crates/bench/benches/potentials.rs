use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use stabfar_core::explore::{optimize, FSicFunctional, OptimizationProblem, Sampler};
use stabfar_core::mubs::{enumerate_flowers, enumerate_petals, stabilizer_mub};
use stabfar_core::potentials::{f_mus, f_sic};
use stabfar_core::{GroupKind, HeisenbergGroup};

fn bench_potentials(c: &mut Criterion) {
    let mut group_bench = c.benchmark_group("potentials");
    for d in [3usize, 7, 13] {
        let group = HeisenbergGroup::build(d, GroupKind::Single).unwrap();
        let mub = stabilizer_mub(&group, &enumerate_flowers(&group)[0]).unwrap();
        let sampler = Sampler::new(d, 1);
        let psi = sampler.state_at(0);
        group_bench.bench_with_input(BenchmarkId::new("f_sic", d), &d, |b, _| {
            b.iter(|| f_sic(&group, &psi).unwrap())
        });
        group_bench.bench_with_input(BenchmarkId::new("f_mus", d), &d, |b, _| {
            b.iter(|| f_mus(&mub, &psi).unwrap())
        });
    }
    group_bench.finish();
}

fn bench_enumeration(c: &mut Criterion) {
    let mut group_bench = c.benchmark_group("enumeration");
    for (d, kind) in [(4usize, GroupKind::Bipartite), (7, GroupKind::Single)] {
        let group = HeisenbergGroup::build(d, kind).unwrap();
        group_bench.bench_with_input(BenchmarkId::new("petals", d), &d, |b, _| {
            b.iter(|| enumerate_petals(&group))
        });
        group_bench.bench_with_input(BenchmarkId::new("stabilizer_mub", d), &d, |b, _| {
            b.iter(|| stabilizer_mub(&group, &enumerate_flowers(&group)[0]).unwrap())
        });
    }
    group_bench.finish();
}

fn bench_optimizer(c: &mut Criterion) {
    let group = HeisenbergGroup::build(3, GroupKind::Single).unwrap();
    let objective = FSicFunctional { group: &group, negate: false };
    c.bench_function("optimize/sic_d3_10_restarts", |b| {
        b.iter(|| {
            let problem = OptimizationProblem::unconstrained(3, &objective, 10);
            optimize(&problem, 1).unwrap()
        })
    });
}

criterion_group!(benches, bench_potentials, bench_enumeration, bench_optimizer);
criterion_main!(benches);
