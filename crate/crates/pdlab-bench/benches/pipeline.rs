//! Benchmarks along the main pipeline: parse and label a diagram, build
//! and reduce its quiver-with-potential, certify thinness, check
//! exactness, explore the exchange graph, and measure the boundary.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use pdlab_core::algebra::verify_thin;
use pdlab_core::cluster::{exchange_graph, seed_from_diagram};
use pdlab_core::corpus;
use pdlab_core::cy::check_exactness;
use pdlab_core::parse_plabic;
use pdlab_core::positroid::{all_boundary_measurements, WeightedPlabic};
use pdlab_core::quiver::{qp_from_diagram, reduce_qp};
use pdlab_core::{IceQP, PlabicGraph};

fn pentagon() -> PlabicGraph {
    parse_plabic(corpus::GR25).expect("corpus parses")
}

fn pentagon_qp() -> IceQP {
    let (qp, _) = reduce_qp(&qp_from_diagram(&pentagon()).expect("builds")).expect("reduces");
    qp
}

fn bench_parse_and_label(c: &mut Criterion) {
    c.bench_function("parse_validate_label_gr25", |b| {
        b.iter(|| {
            let g = parse_plabic(black_box(corpus::GR25)).expect("parses");
            assert!(g.validate_axioms().all_passed());
            black_box(g.face_labels().expect("labels"))
        })
    });
}

fn bench_quiver_build(c: &mut Criterion) {
    let g = pentagon();
    c.bench_function("qp_build_reduce_gr25", |b| {
        b.iter(|| {
            let qp = qp_from_diagram(black_box(&g)).expect("builds");
            black_box(reduce_qp(&qp).expect("reduces"))
        })
    });
}

fn bench_thinness(c: &mut Criterion) {
    let qp = pentagon_qp();
    let mut group = c.benchmark_group("verify_thin_gr25");
    for maxdeg in [6u32, 10] {
        group.bench_function(format!("maxdeg_{}", maxdeg), |b| {
            b.iter(|| black_box(verify_thin(black_box(&qp), maxdeg).expect("verifies")))
        });
    }
    group.finish();
}

fn bench_exactness(c: &mut Criterion) {
    let qp = pentagon_qp();
    let (td, _) = verify_thin(&qp, 8).expect("verifies");
    c.bench_function("check_exactness_gr25_all_vertices", |b| {
        b.iter(|| {
            for v in 0..td.qp.quiver.vertices.len() {
                let report = check_exactness(&td, v, &[-3, -2]).expect("runs");
                assert!(black_box(report).passed);
            }
        })
    });
}

fn bench_exchange_graph(c: &mut Criterion) {
    let seed = seed_from_diagram(&pentagon()).expect("seed builds");
    c.bench_function("exchange_graph_gr25", |b| {
        b.iter_batched(
            || seed.clone(),
            |s| black_box(exchange_graph(&s, 64).expect("explores")),
            BatchSize::SmallInput,
        )
    });
}

fn bench_boundary_measurement(c: &mut Criterion) {
    let g = pentagon();
    let wg = WeightedPlabic::sample(&g, 1);
    c.bench_function("boundary_measurements_gr25", |b| {
        b.iter(|| black_box(all_boundary_measurements(black_box(&wg)).expect("computes")))
    });
}

criterion_group!(
    benches,
    bench_parse_and_label,
    bench_quiver_build,
    bench_thinness,
    bench_exactness,
    bench_exchange_graph,
    bench_boundary_measurement
);
criterion_main!(benches);
