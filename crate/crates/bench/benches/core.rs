use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use srva_bench::{dtlz2_samples, sphere_front};
use srva_core::ea::{run_nsga3, EaConfig};
use srva_core::pareto::two_layer_sld;
use srva_core::{hypervolume, HvMethod, KrigingModel, LikelihoodGaConfig};

fn kriging(c: &mut Criterion) {
    let mut group = c.benchmark_group("kriging");
    group.sample_size(10);
    for n in [30, 100] {
        let (x, f) = dtlz2_samples(n, 3, 10, 1);
        let y: Vec<f64> = f.iter().map(|fi| fi[0]).collect();
        group.bench_with_input(BenchmarkId::new("fit", n), &n, |b, _| {
            b.iter(|| KrigingModel::fit(&x, &y, &LikelihoodGaConfig::default()).unwrap())
        });
        let model = KrigingModel::fit(&x, &y, &LikelihoodGaConfig::default()).unwrap();
        let at = x[0].iter().map(|v| 1.0 - v).collect::<Vec<_>>();
        group.bench_with_input(BenchmarkId::new("predict", n), &n, |b, _| {
            b.iter(|| model.predict(&at))
        });
    }
    group.finish();
}

fn hv(c: &mut Criterion) {
    let mut group = c.benchmark_group("hypervolume");
    for n in [50, 200] {
        let front = sphere_front(n, 3, 2);
        group.bench_with_input(BenchmarkId::new("exact-m3", n), &front, |b, front| {
            b.iter(|| hypervolume(front, &[1.1; 3], &HvMethod::Exact))
        });
    }
    group.sample_size(10);
    let front = sphere_front(200, 6, 3);
    let mc = HvMethod::MonteCarlo {
        samples: 100_000,
        seed: 1,
        lower: vec![0.0; 6],
    };
    group.bench_function("monte-carlo-m6-1e5", |b| {
        b.iter(|| hypervolume(&front, &[1.1; 6], &mc))
    });
    group.finish();
}

fn nsga3(c: &mut Criterion) {
    let mut group = c.benchmark_group("nsga3");
    group.sample_size(10);
    let dirs = two_layer_sld(3, 12, 0).vectors;
    let cfg = EaConfig {
        generations: 50,
        ..EaConfig::default()
    };
    let dtlz2 = |x: &[f64]| -> Vec<f64> {
        let g: f64 = x[2..].iter().map(|v| (v - 0.5).powi(2)).sum();
        let (a, b) = (
            x[0] * std::f64::consts::FRAC_PI_2,
            x[1] * std::f64::consts::FRAC_PI_2,
        );
        vec![
            (1.0 + g) * a.cos() * b.cos(),
            (1.0 + g) * a.cos() * b.sin(),
            (1.0 + g) * a.sin(),
        ]
    };
    group.bench_function("dtlz2-m3-91dirs-50gens", |b| {
        b.iter(|| run_nsga3(dtlz2, &[0.0; 10], &[1.0; 10], &dirs, &cfg))
    });
    group.finish();
}

criterion_group!(benches, kriging, hv, nsga3);
criterion_main!(benches);
