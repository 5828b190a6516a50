use std::hint::black_box;

use coopsense::montecarlo::{simulate, SimScenario, WeightMode};
use coopsense::specfun::marcum_q;
use coopsense::{psi_d_lognormal, psi_d_nakagami, psi_d_rayleigh, ChannelModel, SensingParams};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn special_functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("marcum_q");
    for (m, a, b) in [(1u32, 1.0, 2.0), (10, 5.0, 6.0), (50, 30.0, 35.0)] {
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("M{m}")),
            &(m, a, b),
            |bch, &(m, a, b)| {
                bch.iter(|| marcum_q(black_box(m), black_box(a), black_box(b)).unwrap())
            },
        );
    }
    g.finish();
}

fn closed_forms(c: &mut Criterion) {
    let g = coopsense::db_to_linear(6.0);
    c.bench_function("psi_d_rayleigh n=5 r=2", |b| {
        b.iter(|| psi_d_rayleigh(black_box(20.0), 5, 2, g, 5.0).unwrap())
    });
    c.bench_function("psi_d_nakagami n=5 r=2 m=3", |b| {
        b.iter(|| psi_d_nakagami(black_box(20.0), 5, 2, 3, g, 5.0).unwrap())
    });
    let mut grp = c.benchmark_group("psi_d_lognormal n=3");
    for l in [5usize, 15, 31] {
        grp.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| psi_d_lognormal(black_box(10.0), 3, 1, 1.0, 6.0, 3.0, l).unwrap())
        });
    }
    grp.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let p = SensingParams::new(1, 3, 4.0, 10.0).unwrap();
    let mut grp = c.benchmark_group("simulate 10k trials");
    grp.sample_size(20);
    for mode in [WeightMode::Egc, WeightMode::WcAdaptive] {
        let sc = SimScenario::new(
            p,
            ChannelModel::Rayleigh { mean_gamma: 4.0 },
            vec![200.0, 350.0, 500.0],
            mode.clone(),
            10_000,
            1,
        )
        .unwrap();
        grp.bench_function(mode.name(), |b| {
            b.iter(|| simulate(black_box(&sc)).unwrap())
        });
    }
    grp.finish();
}

criterion_group!(benches, special_functions, closed_forms, monte_carlo);
criterion_main!(benches);
