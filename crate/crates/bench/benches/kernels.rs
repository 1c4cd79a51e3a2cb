use criterion::{black_box, criterion_group, criterion_main, Criterion};
use turnpoint::grushin::{plancherel_density, GrushinModel, PlancherelOptions, PlancherelQuery, Spectra};
use turnpoint::olver::{build_frame, FrameConfig, NormalizedPotential};
use turnpoint::potentials::{make_potential, PotentialSpec};
use turnpoint::schrodinger::{solve_eigen, SolverConfig};
use turnpoint::semiclassical::bs_count;
use turnpoint::special::airy_ai;

fn special(c: &mut Criterion) {
    c.bench_function("airy_ai sweep", |b| {
        b.iter(|| (-400..400).map(|k| airy_ai(black_box(k as f64 * 0.05))).sum::<f64>())
    });
}

fn spectra(c: &mut Criterion) {
    let v = make_potential(PotentialSpec::log_perturbed(1.5, 0.05)).unwrap();
    let cfg = SolverConfig { cross_validate: false, ..SolverConfig::default() };
    c.bench_function("solve_eigen n=20", |b| b.iter(|| solve_eigen(&v, black_box(1.0), 20, &cfg).unwrap()));
    c.bench_function("bs_count", |b| b.iter(|| bs_count(&v, 1.0, black_box(37.0)).unwrap()));
}

fn olver(c: &mut Criterion) {
    let u = NormalizedPotential::new(make_potential(PotentialSpec::power(1.5)).unwrap()).unwrap();
    let mut g = c.benchmark_group("olver");
    g.sample_size(10);
    g.bench_function("build_frame", |b| b.iter(|| build_frame(&u, &FrameConfig::default()).unwrap()));
    g.finish();
}

fn grushin(c: &mut Criterion) {
    let m = GrushinModel::power(1, 1, 1.5).unwrap();
    let s = Spectra::new(&m, SolverConfig { cross_validate: false, ..SolverConfig::default() });
    let q = PlancherelQuery { lambda: 1.0, x: vec![0.5], gamma: 0.3 };
    let opts = PlancherelOptions::default();
    plancherel_density(&m, &s, &q, &opts).unwrap();
    let mut g = c.benchmark_group("grushin");
    g.sample_size(10);
    g.bench_function("plancherel_density warm", |b| b.iter(|| plancherel_density(&m, &s, black_box(&q), &opts).unwrap()));
    g.finish();
}

criterion_group!(kernels, special, spectra, olver, grushin);
criterion_main!(kernels);
