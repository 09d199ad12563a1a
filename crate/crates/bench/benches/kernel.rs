use std::hint::black_box;

use bmlab_core::families::{instance_rng, intconvex_pair, random_cells};
use bmlab_core::geom::measure::region_measure;
use bmlab_core::geom::minkowski::minkowski_combine;
use bmlab_core::geom::polytope::convex_hull;
use bmlab_core::oracle::{minkowski_direct_boxes, sweep_union_volume, DEFAULT_PAIR_CAP};
use bmlab_core::rational::{point, rat};
use bmlab_core::{CellSet, GridSpec, Simplex, Weight};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn convex_pair(size: i64) -> (CellSet, CellSet) {
    let grid = GridSpec::new(2, rat(1, size)).unwrap();
    intconvex_pair(&mut instance_rng(1, size as u64), &grid, size).unwrap()
}

fn minkowski(c: &mut Criterion) {
    let t = Weight::from_ratio(1, 3).unwrap();
    let mut g = c.benchmark_group("minkowski_combine");
    for size in [16, 64, 256] {
        let (a, b) = convex_pair(size);
        g.bench_with_input(BenchmarkId::from_parameter(size), &(a, b), |bch, (a, b)| {
            bch.iter(|| minkowski_combine(black_box(a), black_box(b), &t).unwrap())
        });
    }
    g.finish();
}

fn hull(c: &mut Criterion) {
    let mut g = c.benchmark_group("convex_hull");
    for size in [16, 64, 256] {
        let (a, _) = convex_pair(size);
        g.bench_with_input(BenchmarkId::from_parameter(size), &a, |bch, a| bch.iter(|| convex_hull(black_box(a)).unwrap().volume()));
    }
    g.finish();
}

fn region(c: &mut Criterion) {
    let tri = Simplex::new(vec![point(&[(1, 8), (1, 9)]), point(&[(7, 8), (1, 5)]), point(&[(1, 3), (6, 7)])]).unwrap().to_polytope();
    let mut g = c.benchmark_group("region_measure");
    for size in [16, 64, 256] {
        let (a, _) = convex_pair(size);
        g.bench_with_input(BenchmarkId::from_parameter(size), &a, |bch, a| bch.iter(|| region_measure(black_box(a), &tri).unwrap()));
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let t = Weight::from_ratio(1, 2).unwrap();
    let grid = GridSpec::new(2, rat(1, 4)).unwrap();
    let mut g = c.benchmark_group("oracle_sweep");
    for n in [10, 40, 100] {
        let mut rng = instance_rng(2, n as u64);
        let a = random_cells(&mut rng, &grid, n);
        let b = random_cells(&mut rng, &grid, n);
        let boxes = minkowski_direct_boxes(&a, &b, &t, DEFAULT_PAIR_CAP).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n * n), &boxes, |bch, bl| bch.iter(|| sweep_union_volume(black_box(bl)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, minkowski, hull, region, sweep);
criterion_main!(benches);
