use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use sharp_embed::certify::{self, ParamGrid, Suite};
use sharp_embed::par::linspace;
use sharp_embed::phase_plane::alpha_star;
use sharp_embed::quadrature::period_integral;
use sharp_embed::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn period_grid(c: &mut Criterion) {
    let cells: Vec<(f64, f64)> = linspace(2.2, 4.0, 16)
        .into_iter()
        .flat_map(|q| {
            let a = alpha_star(q).unwrap();
            linspace(0.02, 0.98, 64).into_iter().map(move |r| (q, r * a))
        })
        .collect();
    let mut g = c.benchmark_group("period_integral_grid");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                exec.map(&cells, |&(q, a)| period_integral(q, a, 1e-12).unwrap().value)
            })
        });
    }
    g.finish();
}

fn certificate_grids(c: &mut Criterion) {
    let grid = ParamGrid::lemma22_default().refined(2);
    let mut g = c.benchmark_group("certify_lemma22_grid");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| certify::certify_lemma22_grid(black_box(&grid), 256, exec).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("certify_main_lemma");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| certify::certify_suite(Suite::MainLemma, 1, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, period_grid, certificate_grids);
criterion_main!(benches);
