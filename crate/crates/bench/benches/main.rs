//! Criterion benchmarks for the hot paths: `wp` evaluation, the character-sum
//! formula, residue-system construction, power residue symbols, and the
//! period computation.

use criterion::{criterion_group, criterion_main, Criterion};
use lseries_core::eisenstein::{self, CongruenceClass, EisensteinInt, SquarefreeD, SubsetSelector};
use lseries_core::hecke;
use lseries_core::weierstrass::{self, KPoint, LatticeContext};

fn pi_13_12() -> EisensteinInt {
    EisensteinInt::new(13, 12)
}

fn d_pi() -> SquarefreeD {
    SquarefreeD::new(vec![pi_13_12()], CongruenceClass::Mod12).unwrap()
}

fn bench_wp(c: &mut Criterion) {
    let ctx = LatticeContext::new(50).unwrap();
    let z = KPoint::new(EisensteinInt::new(31, 7), 157).unwrap();
    c.bench_function("wp_eval_p50", |b| {
        b.iter(|| ctx.wp_at(std::hint::black_box(&z)).unwrap())
    });
}

fn bench_formula(c: &mut Criterion) {
    let ctx = LatticeContext::new(30).unwrap();
    let d = d_pi();
    let t = SubsetSelector::empty();
    let mut group = c.benchmark_group("formula");
    group.sample_size(10);
    group.bench_function("formula_l1_pi_p30", |b| {
        b.iter(|| hecke::formula_l1(std::hint::black_box(&d), &t, &ctx).unwrap())
    });
    group.finish();
}

fn bench_residue_system(c: &mut Criterion) {
    let d = SquarefreeD::new(
        vec![pi_13_12(), EisensteinInt::new(1, -12)],
        CongruenceClass::Mod12,
    )
    .unwrap();
    let mut group = c.benchmark_group("residues");
    group.sample_size(10);
    group.bench_function("residue_system_two_primes", |b| {
        b.iter(|| eisenstein::residue_system(std::hint::black_box(&d)).unwrap())
    });
    group.finish();
}

fn bench_symbol(c: &mut Criterion) {
    let alpha = EisensteinInt::new(31, 7);
    let pi = pi_13_12();
    c.bench_function("power_residue_symbol", |b| {
        b.iter(|| eisenstein::power_residue_symbol(std::hint::black_box(&alpha), &pi, 2).unwrap())
    });
}

fn bench_omega(c: &mut Criterion) {
    let mut group = c.benchmark_group("omega");
    group.sample_size(10);
    group.bench_function("compute_omega_p30", |b| {
        b.iter(|| weierstrass::compute_omega(std::hint::black_box(30)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_wp,
    bench_formula,
    bench_residue_system,
    bench_symbol,
    bench_omega
);
criterion_main!(benches);
