//! Sequential against parallel execution on the heaviest loops: axiom
//! checking and filter models.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use foalg::algebra::FiniteAlgebra;
use foalg::axioms::{check_axiom, AxiomId, Bounds};
use foalg::lattice::{join_irreducibles, prime_filters};
use foalg::representation::filter_to_morphism;
use foalg::{Exec, Fragment, Universe};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn axioms(c: &mut Criterion) {
    let alg = FiniteAlgebra::concrete(Universe::new(2), Fragment::FO_EQ, 3).unwrap();
    let mut group = c.benchmark_group("check_axiom");
    group.sample_size(10);
    for axiom in [AxiomId::A0, AxiomId::A3, AxiomId::A9] {
        for (name, exec) in MODES {
            let mut bounds = Bounds::new(3).with_exec(exec);
            bounds.samples = 20_000;
            group.bench_with_input(BenchmarkId::new(name, axiom.name()), &bounds, |b, bounds| {
                b.iter(|| black_box(check_axiom(&alg, axiom, bounds).unwrap().checked))
            });
        }
    }
    group.finish();
}

fn lattices(c: &mut Criterion) {
    let mut group = c.benchmark_group("join_irreducibles");
    group.sample_size(10);
    // Sort 4 of the two-point algebra has 2^16 elements; the lattice cache is
    // rebuilt per iteration by constructing a fresh algebra.
    group.bench_function("concrete(2) sort 3", |b| {
        b.iter(|| {
            let alg = FiniteAlgebra::concrete(Universe::new(2), Fragment::PQF, 3).unwrap();
            black_box(join_irreducibles(&alg, 3).unwrap().len())
        })
    });
    group.finish();

    let alg = FiniteAlgebra::concrete(Universe::new(2), Fragment::PE, 3).unwrap();
    let filters = prime_filters(&alg, 3).unwrap();
    let mut group = c.benchmark_group("filter_models");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                foalg::exec::map_slice(exec, &filters, |f| {
                    filter_to_morphism(&alg, f, Fragment::PE, 2).unwrap().is_verified()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, axioms, lattices);
criterion_main!(benches);
