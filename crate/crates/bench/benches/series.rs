use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qbessel::bqbessel::{eval_dj_dlambda_ext, eval_j_ext};
use qbessel::qcalc::qpoch_inf;
use qbessel_bench::{context, CASES};

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("eval_j_ext");
    for (q, alpha) in CASES {
        for z in [0.25, 100.0, 1e6] {
            let ctx = context(q, alpha);
            g.bench_with_input(
                BenchmarkId::new(format!("q={q},alpha={alpha}"), z),
                &z,
                |b, &z| b.iter(|| eval_j_ext(&ctx, black_box(1.0), black_box(z)).unwrap()),
            );
        }
    }
    g.finish();

    let ctx = context(0.5, 0.0).with_tol(1e-24).unwrap();
    c.bench_function("dj_dlambda tight", |b| {
        b.iter(|| eval_dj_dlambda_ext(&ctx, 1.0, black_box(15.998)).unwrap())
    });
    c.bench_function("qpoch_inf q=0.99", |b| {
        b.iter(|| qpoch_inf(black_box(0.5), black_box(0.99), 1e-16).unwrap())
    });
}

criterion_group!(benches, series);
criterion_main!(benches);
