use criterion::{criterion_group, criterion_main, Criterion};

use rectenna_core::combiner::{design_wilkinson, microstrip_synthesis, sparams};

fn bench_sparams(c: &mut Criterion) {
    let design = design_wilkinson(2, 50.0, 50.0, 0.9e9).unwrap();
    c.bench_function("wilkinson_sparams_sweep_201", |b| {
        b.iter(|| {
            for k in 1..=201 {
                let f = 0.01e9 * k as f64;
                let _ = sparams(&design, f).unwrap();
            }
        })
    });
}

fn bench_microstrip(c: &mut Criterion) {
    c.bench_function("microstrip_synthesis_50ohm_fr4", |b| {
        b.iter(|| microstrip_synthesis(50.0, 4.4, 1.6e-3, 0.9e9).unwrap())
    });
}

criterion_group!(benches, bench_sparams, bench_microstrip);
criterion_main!(benches);
