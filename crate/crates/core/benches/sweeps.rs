use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use torsion_core::gluing::{zeta_gluing_batch, GluingScenario};
use torsion_core::mayer_vietoris::convergence_batch;
use torsion_core::sample::{child_seed, subspace_pair};
use torsion_core::suite::{mv_scenario, MAX_H, MV_LENGTHS};
use torsion_core::Exec;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn zeta_gluing(c: &mut Criterion) {
    let scenarios: Vec<GluingScenario> = (0..64)
        .map(|i| {
            let (l1, l2) = subspace_pair(child_seed(7, i), &MAX_H);
            GluingScenario::new(l1, l2, vec![1.0, 10.0, 100.0], 1e-10).unwrap()
        })
        .collect();
    let mut group = c.benchmark_group("zeta_gluing_64");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| zeta_gluing_batch(exec, black_box(&scenarios)))
        });
    }
    group.finish();
}

fn mv_convergence(c: &mut Criterion) {
    let diagrams: Vec<_> = (0..32).map(|i| mv_scenario(child_seed(11, i))).collect();
    let mut group = c.benchmark_group("mv_convergence_32");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| convergence_batch(exec, black_box(&diagrams), &MV_LENGTHS))
        });
    }
    group.finish();
}

criterion_group!(benches, zeta_gluing, mv_convergence);
criterion_main!(benches);
