use criterion::{black_box, criterion_group, criterion_main, Criterion};
use neofuzzy::membership::{MembershipGrid, MembershipKind};
use neofuzzy_bench::model_config;

fn bench_activations(c: &mut Criterion) {
    let mut group = c.benchmark_group("membership");
    let xs: Vec<f64> = (0..256).map(|k| k as f64 / 255.0).collect();

    let triangular = MembershipGrid::uniform(5, MembershipKind::Triangular, 2).unwrap();
    group.bench_function("triangular_h5", |b| {
        b.iter(|| {
            for &x in &xs {
                black_box(triangular.activations(black_box(x)));
            }
        })
    });

    for q in [2usize, 3, 5] {
        let grid = MembershipGrid::uniform(5, MembershipKind::BSpline, q).unwrap();
        group.bench_function(format!("bspline_h5_q{q}"), |b| {
            b.iter(|| {
                for &x in &xs {
                    black_box(grid.activations(black_box(x)));
                }
            })
        });
    }
    group.finish();
}

fn bench_forward(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward");
    for p in [0usize, 2, 5] {
        let config = model_config(4, 3, p);
        let model = neofuzzy::synapse::EnfnModel::zeros(config.clone());
        let x = [0.21, 0.55, 0.83, 0.4];
        group.bench_function(format!("fuzzify_n4_h3_p{p}"), |b| {
            b.iter(|| black_box(config.fuzzify(black_box(&x)).unwrap()))
        });
        group.bench_function(format!("predict_n4_h3_p{p}"), |b| {
            b.iter(|| black_box(model.predict(black_box(&x)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_activations, bench_forward);
criterion_main!(benches);
