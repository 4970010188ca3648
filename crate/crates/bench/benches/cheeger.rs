use cheeger_core::isoperimetry::{self, BallKind};
use cheeger_core::spectral::{self, FormMatrix};
use cheeger_core::{
    GraphFamily, MeasureConvention, MetricAssignment, MetricRecipe, RandomSpec, SphereLaw,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn tree(k: usize, radius: usize) -> cheeger_core::WeightedGraph {
    GraphFamily::KRegularTree {
        k,
        radius,
        measure: MeasureConvention::WeightedDegree,
    }
    .generate()
    .unwrap()
}

fn exact_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("cheeger_exact");
    group.sample_size(10);
    for size in [12, 16, 20] {
        let graph = GraphFamily::RandomWeighted(RandomSpec::new(size, 1))
            .generate()
            .unwrap();
        let metric = MetricAssignment::build(&graph, MetricRecipe::Canonical).unwrap();
        let subset: Vec<_> = graph.vertices().collect();
        group.bench_with_input(BenchmarkId::from_parameter(size), &subset, |b, u| {
            b.iter(|| isoperimetry::cheeger_exact(&graph, &metric, black_box(u), 20).unwrap())
        });
    }
    group.finish();
}

fn heuristics(c: &mut Criterion) {
    let graph = tree(3, 7);
    let metric = MetricAssignment::build(&graph, MetricRecipe::Canonical).unwrap();
    let subset: Vec<_> = graph.vertices().collect();
    let radii: Vec<f64> = (1..=7).map(f64::from).collect();
    c.bench_function("cheeger_balls/tree3_r7", |b| {
        b.iter(|| {
            isoperimetry::cheeger_balls(&graph, &metric, 0, black_box(&radii), BallKind::Metric)
                .unwrap()
        })
    });
    c.bench_function("cheeger_sweep/tree3_r7", |b| {
        b.iter(|| isoperimetry::cheeger_sweep(&graph, &metric, black_box(&subset)).unwrap())
    });
}

fn ground_state(c: &mut Criterion) {
    let mut group = c.benchmark_group("lambda0");
    group.sample_size(10);
    // Below and above the dense cutoff.
    for (k, radius) in [(2, 7), (2, 10), (3, 7)] {
        let graph = tree(k, radius);
        let subset: Vec<_> = graph.vertices().collect();
        let form = FormMatrix::assemble(&graph, &subset).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(graph.vertex_count()),
            &form,
            |b, f| b.iter(|| spectral::lambda0(black_box(f)).unwrap()),
        );
    }
    group.finish();
}

fn metric_closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("metric");
    let antitree = GraphFamily::Antitree {
        spheres: SphereLaw::Square,
        radius: 8,
        measure: MeasureConvention::WeightedDegree,
    }
    .generate()
    .unwrap();
    let random = GraphFamily::RandomWeighted(RandomSpec::new(200, 2))
        .generate()
        .unwrap();
    for (name, graph) in [("antitree_r8", &antitree), ("random_200", &random)] {
        group.bench_function(BenchmarkId::new("build", name), |b| {
            b.iter(|| MetricAssignment::build(black_box(graph), MetricRecipe::Canonical).unwrap())
        });
        let metric = MetricAssignment::build(graph, MetricRecipe::Canonical).unwrap();
        group.bench_function(BenchmarkId::new("certify", name), |b| {
            b.iter(|| metric.certify_intrinsic(black_box(graph)))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    exact_enumeration,
    heuristics,
    ground_state,
    metric_closure
);
criterion_main!(benches);
