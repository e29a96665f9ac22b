use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use geomod_core::desitter::{ds_disjoint, ds_reconstruct, random_ds_wedge, sampled_intersect, LorentzOracle};
use geomod_core::feasibility::wedges_intersect;
use geomod_core::minkowski::{are_disjoint, is_maximal_pair};
use geomod_core::poincare::{factor_into_wedge_reflections, transport, wedge_reflection};
use geomod_core::reconstruction::{reconstruct, PointMapOracle};
use geomod_core::sampling;
use geomod_core::sl2c::{covering_map, lift};
use geomod_core::suites::disjoint_pair;

fn wedges(c: &mut Criterion) {
    let mut rng = sampling::rng(1);
    let (a, b) = (sampling::wedge(&mut rng), sampling::wedge(&mut rng));
    let (p, q, _) = disjoint_pair(&mut rng, 0);
    c.bench_function("are_disjoint", |bch| bch.iter(|| are_disjoint(black_box(&a), black_box(&b))));
    c.bench_function("feasibility oracle, two wedges", |bch| bch.iter(|| wedges_intersect(black_box(&[a, b]))));
    c.bench_function("is_maximal_pair", |bch| bch.iter(|| is_maximal_pair(black_box(&p), black_box(&q))));
}

fn poincare(c: &mut Criterion) {
    let mut rng = sampling::rng(2);
    let (a, b) = (sampling::wedge(&mut rng), sampling::wedge(&mut rng));
    let e = sampling::restricted_element(&mut rng);
    c.bench_function("transport", |bch| bch.iter(|| transport(black_box(&a), black_box(&b))));
    c.bench_function("wedge_reflection", |bch| bch.iter(|| wedge_reflection(black_box(&a))));
    c.bench_function("factor_into_wedge_reflections", |bch| bch.iter(|| factor_into_wedge_reflections(black_box(&e))));
    let x = sampling::sl2c(&mut rng);
    let r = covering_map(&x);
    c.bench_function("covering_map", |bch| bch.iter(|| covering_map(black_box(&x))));
    c.bench_function("lift", |bch| bch.iter(|| lift(black_box(&r))));
}

fn reconstruction(c: &mut Criterion) {
    let e = sampling::extended_element(&mut sampling::rng(3), 0.5, 2.0);
    let oracle = PointMapOracle::new(e);
    c.bench_function("reconstruct point-map oracle", |bch| bch.iter(|| reconstruct(black_box(&oracle))));
}

fn desitter(c: &mut Criterion) {
    let mut rng = sampling::rng(4);
    let (a, b) = (random_ds_wedge(&mut rng), random_ds_wedge(&mut rng));
    let oracle = LorentzOracle(sampling::restricted_lorentz(&mut rng, 1.5));
    c.bench_function("ds_disjoint", |bch| bch.iter(|| ds_disjoint(black_box(&a), black_box(&b))));
    c.bench_function("sampled_intersect, 10^4 points", |bch| {
        bch.iter(|| sampled_intersect(black_box(&a), black_box(&a.causal_complement()), 10_000, &mut rng))
    });
    c.bench_function("ds_reconstruct", |bch| bch.iter(|| ds_reconstruct(black_box(&oracle), 50, 0)));
}

criterion_group!(benches, wedges, poincare, reconstruction, desitter);
criterion_main!(benches);
