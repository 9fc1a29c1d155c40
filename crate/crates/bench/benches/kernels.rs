use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gfn_bench::{e6_jet_point, half, precision, tau, DIGITS};
use gfn_core::exact_algebra::rat;
use gfn_core::flat_coords::{s_of_t, t_of_s};
use gfn_core::g_function::{dg_dt_ring_at, g_closed_at_s};
use gfn_core::getzler::{getzler_delta, PolynomialG, PolynomialPrepotential};
use gfn_core::halphen::{d4_oracles, D4G};
use gfn_core::milnor_ring::{build_model, multiplication_table};
use gfn_core::special_functions::{dedekind_eta, hyp2f1, HypParams};
use gfn_core::{ModelName, SAssignment};
use rug::Complex;

fn algebra(c: &mut Criterion) {
    let (model, point) = e6_jet_point();
    c.bench_function("e6t jet table", |b| {
        b.iter(|| multiplication_table(black_box(&model), black_box(&point)).unwrap())
    });
    let e8 = build_model(ModelName::E8t);
    let p8 = SAssignment::marginal(&e8, rat(1, 3));
    c.bench_function("e8t table", |b| {
        b.iter(|| multiplication_table(&e8, black_box(&p8)).unwrap())
    });
}

fn special(c: &mut Criterion) {
    let mut group = c.benchmark_group("special");
    let params = HypParams::from_ints((1, 3), (1, 3), (2, 3));
    for digits in DIGITS {
        let prec = precision(digits);
        let u = half(prec);
        group.bench_with_input(BenchmarkId::new("hyp2f1", digits), &u, |b, u| {
            b.iter(|| hyp2f1(&params, u, 0, prec).unwrap())
        });
        let t = tau(prec);
        group.bench_with_input(BenchmarkId::new("eta", digits), &t, |b, t| {
            b.iter(|| dedekind_eta(t, prec).unwrap())
        });
    }
    group.finish();
}

fn flat(c: &mut Criterion) {
    let mut group = c.benchmark_group("flat");
    for digits in DIGITS {
        let prec = precision(digits);
        let s = half(prec);
        let t = t_of_s(ModelName::E6t, &s, prec).unwrap();
        group.bench_with_input(BenchmarkId::new("s_of_t", digits), &t, |b, t| {
            b.iter(|| s_of_t(ModelName::E6t, t, prec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("g_closed", digits), &s, |b, s| {
            b.iter(|| g_closed_at_s(ModelName::E6t, s, prec).unwrap())
        });
    }
    let prec = precision(64);
    group.bench_function("dg_dt_ring", |b| {
        b.iter(|| dg_dt_ring_at(ModelName::E6t, &rat(1, 2), 2, prec).unwrap())
    });
    group.finish();
}

fn getzler(c: &mut Criterion) {
    let prec = precision(64);
    let a2 = PolynomialPrepotential::a2();
    let point: Vec<Complex> = [0.3, 0.7]
        .iter()
        .map(|x| Complex::with_val(prec.bits(), (*x, 0)))
        .collect();
    let z: Vec<Complex> = [0.9, 1.25]
        .iter()
        .map(|x| Complex::with_val(prec.bits(), (*x, 0)))
        .collect();
    c.bench_function("getzler a2", |b| {
        b.iter(|| getzler_delta(&a2, &PolynomialG::zero(2), &point, &z, prec).unwrap())
    });
    let (d4, _) = d4_oracles(prec).unwrap();
    let mut p6: Vec<Complex> = (0..5)
        .map(|k| Complex::with_val(prec.bits(), (0.2 * k as f64 + 0.1, 0)))
        .collect();
    p6.push(tau(prec));
    let z6: Vec<Complex> = (0..6)
        .map(|k| Complex::with_val(prec.bits(), (1.0 - 0.1 * k as f64, 0)))
        .collect();
    c.bench_function("getzler d4", |b| {
        b.iter(|| getzler_delta(&d4, &D4G, &p6, &z6, prec).unwrap())
    });
}

criterion_group!(benches, algebra, special, flat, getzler);
criterion_main!(benches);
