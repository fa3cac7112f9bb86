//! Benchmarks for the exact-arithmetic core, driven from `benches/core.rs`.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use qtspp_core::guess::{build_table, guess_operators, AnsatzStructure, GuessConfig, TableSource};
use qtspp_core::okada::{check_batch, identity_plan, solve_cofactors, OkadaMatrix, Prescreen, DEFAULT_IDENTITY_LIMIT};
use qtspp_core::ore::fixtures::{random_poly, random_univariate, rng};
use qtspp_core::ore::right_divide;
use qtspp_core::qfield::gcd;
use qtspp_core::tspp::generating_polynomial;
use qtspp_core::RatFunc;

pub fn benchmarks(c: &mut Criterion) {
    arithmetic(c);
    okada(c);
    enumeration(c);
    operators(c);
    guessing(c);
}

fn arithmetic(c: &mut Criterion) {
    let mut r = rng(7);
    let a = random_poly(&mut r, [4, 2, 2, 0], 12, 50);
    let b = random_poly(&mut r, [4, 2, 2, 0], 12, 50);
    let g = random_poly(&mut r, [2, 1, 1, 0], 4, 9);
    let (ag, bg) = (&a * &g, &b * &g);
    c.bench_function("poly mul", |bn| bn.iter(|| black_box(&a) * black_box(&b)));
    c.bench_function("poly gcd", |bn| bn.iter(|| gcd(black_box(&ag), black_box(&bg)).unwrap()));
    let x = RatFunc::new(a.clone(), g.clone()).unwrap();
    let y = RatFunc::new(b.clone(), &g + &a).unwrap();
    c.bench_function("ratfunc add", |bn| bn.iter(|| black_box(&x) + black_box(&y)));
}

fn okada(c: &mut Criterion) {
    let mut group = c.benchmark_group("okada");
    group.sample_size(10);
    for n in [4u32, 6, 8] {
        let m = OkadaMatrix::new(n).unwrap();
        group.bench_with_input(BenchmarkId::new("det", n), &m, |bn, m| bn.iter(|| m.det()));
        group.bench_with_input(BenchmarkId::new("cofactors", n), &n, |bn, &n| bn.iter(|| solve_cofactors(n).unwrap()));
    }
    let plan = identity_plan(6);
    let ps = Prescreen::default();
    group.bench_function("identities n=6", |bn| {
        bn.iter(|| check_batch(6, &plan, DEFAULT_IDENTITY_LIMIT, None).unwrap())
    });
    group.bench_function("identities n=6 prescreened", |bn| {
        bn.iter(|| check_batch(6, &plan, DEFAULT_IDENTITY_LIMIT, Some(&ps)).unwrap())
    });
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("tspp");
    group.sample_size(10);
    for n in [3u32, 4, 5] {
        group.bench_with_input(BenchmarkId::new("generating polynomial", n), &n, |bn, &n| {
            bn.iter(|| generating_polynomial(n).unwrap())
        });
    }
    group.finish();
}

fn operators(c: &mut Criterion) {
    let mut r = rng(11);
    let a = random_univariate(&mut r, 4, 2);
    let b = random_univariate(&mut r, 2, 2);
    c.bench_function("operator product", |bn| bn.iter(|| black_box(&a) * black_box(&b)));
    let ab = &a * &b;
    c.bench_function("right division", |bn| bn.iter(|| right_divide(black_box(&ab), black_box(&b)).unwrap()));
}

fn guessing(c: &mut Criterion) {
    let mut group = c.benchmark_group("guess");
    group.sample_size(10);
    let table = build_table((1, 12), &TableSource::Diagonal).unwrap();
    let s = AnsatzStructure::new([(0, 0), (1, 1)], [1, 1, 1], true).unwrap();
    let config = GuessConfig {
        holdout: 4,
        oversample: 4,
        ..GuessConfig::default()
    };
    group.bench_function("constant diagonal", |bn| bn.iter(|| guess_operators(&table, &s, &config).unwrap()));
    group.finish();
}
