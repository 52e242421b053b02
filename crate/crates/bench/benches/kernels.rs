use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use painlin::closed_forms::painleve_ince;
use painlin::numeric::{integrate, invert_monotone, quadrature};
use painlin::verify::residual;
use painlin::{solve, Curve, FunctionFamily, OdeProblem, SolveRequest, Start};

fn numeric_kernels(c: &mut Criterion) {
    c.bench_function("dopri5 oscillator, 10 periods", |b| {
        b.iter(|| {
            let rhs = |_x: f64, y: &[f64], d: &mut [f64]| {
                d[0] = y[1];
                d[1] = -y[0];
            };
            integrate(rhs, 0.0, black_box(&[1.0, 0.0]), 20.0 * std::f64::consts::PI, 1e-10).unwrap()
        })
    });
    c.bench_function("adaptive quadrature", |b| {
        b.iter(|| quadrature::integrate(&|x: f64| x.sin() * (-x).exp(), 0.0, black_box(10.0), 1e-12).unwrap())
    });
    c.bench_function("monotone inversion", |b| {
        let f = |y: f64| y * y * y + y;
        b.iter(|| invert_monotone(&f, black_box(5.0), (-10.0, 10.0), 1e-13).unwrap())
    });
}

fn closed_forms(c: &mut Criterion) {
    let s = painleve_ince(3.0, -1.0, 1.0, 0.5, 2.0).unwrap();
    let problem = OdeProblem::new(FunctionFamily::identity(), 3.0, 2.0, -1.0).unwrap();
    let points: Vec<f64> = (0..200).map(|i| i as f64 / 199.0).collect();
    c.bench_function("Painleve-Ince jet", |b| b.iter(|| s.jet(black_box(0.7)).unwrap()));
    c.bench_function("residual over 200 points", |b| {
        b.iter(|| residual(&problem, &s, black_box(&points)).unwrap())
    });
}

fn pipeline(c: &mut Criterion) {
    let pi = OdeProblem::new(FunctionFamily::identity(), 3.0, 2.0, 0.0).unwrap();
    let generic = OdeProblem::new(FunctionFamily::power(1.0, 3.0, 0.0).unwrap(), 1.0, 0.5, 0.0).unwrap();
    let start = Start::Initial {
        x0: 0.0,
        y0: 1.0,
        dy0: 0.0,
    };
    c.bench_function("solve closed form", |b| {
        b.iter(|| solve(&pi, &SolveRequest::new((0.0, 1.0), black_box(start.clone()))).unwrap())
    });
    c.bench_function("solve generic linearization", |b| {
        b.iter(|| solve(&generic, &SolveRequest::new((0.0, 1.0), black_box(start.clone()))).unwrap())
    });
}

criterion_group!(benches, numeric_kernels, closed_forms, pipeline);
criterion_main!(benches);
