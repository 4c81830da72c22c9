use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use thn_core::curvature::{levi_civita, riemann};
use thn_core::forms::{certify_pseudo_kahler, closed_invariant_space, random_nondegenerate_params};
use thn_core::metric::seeded_rng;
use thn_core::{build_thn, Matrix, Rational};

type Workload = (&'static str, Box<dyn Fn() + Send + Sync>);

fn workloads() -> Vec<Workload> {
    let g3 = build_thn(3).unwrap();
    let g4 = build_thn(4).unwrap();
    let s = Matrix::<Rational>::from_fn(14, 14, |r, c| Rational::from_integer(if r == c { 2.into() } else if r.abs_diff(c) == 1 { 1.into() } else { 0.into() }));
    let p = random_nondegenerate_params(2, &mut seeded_rng(5)).unwrap();
    vec![
        ("derivations_n4", Box::new(move || drop(black_box(g4.derivation_algebra())))),
        ("closed_forms_n3", Box::new(|| drop(black_box(closed_invariant_space(3).unwrap())))),
        ("riemann_n3", Box::new(move || drop(black_box(riemann(&levi_civita(&g3, &s).unwrap(), &g3))))),
        ("kahler_certificate_n2", Box::new(move || drop(black_box(certify_pseudo_kahler(&p).unwrap())))),
    ]
}

#[cfg(feature = "parallel")]
fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    let label = format!("default_{}", all.current_num_threads());
    vec![("rayon_1".into(), one), (label, all)]
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    group.sample_size(10);
    for (name, work) in workloads() {
        #[cfg(feature = "parallel")]
        for (label, pool) in pools() {
            group.bench_function(BenchmarkId::new(name, &label), |b| b.iter(|| pool.install(&work)));
        }
        #[cfg(not(feature = "parallel"))]
        group.bench_function(BenchmarkId::new(name, "sequential"), |b| b.iter(|| work()));
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
