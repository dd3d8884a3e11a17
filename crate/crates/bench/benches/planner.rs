use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use riemplan::geodesic::integrate_geodesic;
use riemplan::harness::{Algorithm, Experiment, ScenarioConfig};
use riemplan::planner::{line_r_cost, plan};
use riemplan::PlanarPoint;

fn experiment(name: &str) -> Experiment {
    Experiment::new(ScenarioConfig::preset(name).unwrap()).unwrap()
}

fn edge_costs(c: &mut Criterion) {
    let exp = experiment("peak6-4d");
    let m = exp.model();
    let (a, b) = (PlanarPoint::new(4.2, 3.9), PlanarPoint::new(4.6, 4.1));
    c.bench_function("line_r_cost/peak6-4d", |bench| {
        bench.iter(|| line_r_cost(m, black_box(a), black_box(b)))
    });
    c.bench_function("christoffel_at/peak6-4d", |bench| bench.iter(|| m.christoffel_at(black_box(a))));
}

fn planning(c: &mut Criterion) {
    let mut group = c.benchmark_group("plan");
    group.sample_size(10);
    for algo in Algorithm::ALL {
        let exp = experiment("peak3-3d");
        group.bench_function(format!("peak3-3d/{algo}/2000"), |bench| {
            bench.iter_batched(
                || exp.planner_config(algo, 7, 2000),
                |cfg| plan(exp.model(), &cfg).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn geodesics(c: &mut Criterion) {
    let mut group = c.benchmark_group("geodesic");
    group.sample_size(10);
    let exp = experiment("peak1-3d");
    let opts = exp.geodesic_options();
    let start = exp.scenario().start;
    group.bench_function("integrate/peak1-3d", |bench| {
        bench.iter(|| integrate_geodesic(exp.model(), start, black_box(0.8), &opts).unwrap())
    });
    group.finish();
}

criterion_group!(benches, edge_costs, planning, geodesics);
criterion_main!(benches);
