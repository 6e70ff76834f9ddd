use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use lieshift_core::field::{BinarySubspace, BitRow, PrimeField};
use lieshift_core::group_ring::grigorchuk_p;
use lieshift_core::homoclinic::{build_window_space, Limits};
use lieshift_core::lie::{periodic_zero_pairs, BracketRule, PeriodicCountOptions};

fn periodic_kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("periodic_zero_pairs");
    g.sample_size(10);
    let opts = PeriodicCountOptions::default();
    for n in [2usize, 3, 4] {
        let rule = BracketRule::bracket_k(1);
        g.bench_with_input(BenchmarkId::new("bracket_1", n), &n, |b, &n| {
            b.iter(|| periodic_zero_pairs(&rule, n, opts).unwrap())
        });
    }
    g.finish();
}

fn group_ring_powers(c: &mut Criterion) {
    let mut g = c.benchmark_group("grigorchuk_powers");
    g.sample_size(10);
    let p = grigorchuk_p(PrimeField::binary());
    for e in [4u32, 8, 12] {
        g.bench_with_input(BenchmarkId::new("pow", e), &e, |b, &e| {
            b.iter(|| p.pow(e).unwrap())
        });
    }
    g.finish();
}

fn subspace_insertion(c: &mut Criterion) {
    let mut g = c.benchmark_group("subspace_insert");
    // deterministic pseudo-random rows from a xorshift
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for width in [256usize, 1024] {
        let rows: Vec<BitRow> = (0..width / 2)
            .map(|_| BitRow::from_bits((0..width).map(|_| next() & 1 == 1)))
            .collect();
        g.bench_with_input(BenchmarkId::new("random_rows", width), &rows, |b, rows| {
            b.iter(|| BinarySubspace::spanned_by(width, black_box(rows)).unwrap())
        });
    }
    g.bench_function("homoclinic_x4_1024", |b| {
        b.iter(|| build_window_space(4, 1024, Limits::default()).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    periodic_kernel,
    group_ring_powers,
    subspace_insertion
);
criterion_main!(benches);
