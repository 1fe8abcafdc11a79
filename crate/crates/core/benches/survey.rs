use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use stenzel_spin7::ivp::SolveOptions;
use stenzel_spin7::moduli::survey_with;
use stenzel_spin7::Execution;

fn bench_survey(c: &mut Criterion) {
    let opts = SolveOptions::default();
    let mut group = c.benchmark_group("survey");
    group.sample_size(20);
    for n in [16usize, 128] {
        let grid: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, n), &grid, |b, g| {
                b.iter(|| survey_with(black_box(g), &opts, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_survey);
criterion_main!(benches);
