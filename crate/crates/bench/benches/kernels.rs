use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qcext_core::entropy::hmin;
use qcext_core::extractor_lab::{compose_bitwise_perm_family, compose_mub_perm_family, eval_qc_distance};
use qcext_core::mubs::build_full_mub_set;
use qcext_core::states::random_test_state;

fn sdp(c: &mut Criterion) {
    let mut group = c.benchmark_group("hmin");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (da, db) in [(2, 2), (4, 4), (8, 8)] {
        let rho = random_test_state(da, db, 0.5, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{da}x{db}")), &rho, |b, rho| {
            b.iter(|| hmin(rho, da).unwrap())
        });
    }
    group.finish();
}

fn distance(c: &mut Criterion) {
    let mut group = c.benchmark_group("eval_qc_distance");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cases = [
        ("mub-perm q=5", compose_mub_perm_family(5, 5).unwrap(), 4),
        ("bitwise-perm n=2", compose_bitwise_perm_family(2, 2).unwrap(), 2),
    ];
    for (name, fam, de) in cases {
        let rho = random_test_state(fam.dim(), de, 0.5, &mut rng);
        let a1 = fam.dim();
        group.bench_function(name, |b| b.iter(|| eval_qc_distance(&fam, &rho, a1).unwrap()));
    }
    group.finish();
}

fn mub_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_full_mub_set");
    for q in [8, 9, 16, 32] {
        group.bench_with_input(BenchmarkId::from_parameter(q), &q, |b, &q| b.iter(|| build_full_mub_set(q).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sdp, distance, mub_construction);
criterion_main!(benches);
