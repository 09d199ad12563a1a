use num_traits::{Signed, Zero};
use proptest::prelude::*;

use bmlab_core::deficits::{box_hull_bound_check, delta_t, freiman_check_1d, optimal_translation_symdiff, TranslationScan};
use bmlab_core::families::{equalize, instance_rng, random_1d_pair, random_box_pair};
use bmlab_core::geom::measure::{overlap_volume, region_measure, symdiff_volume};
use bmlab_core::geom::minkowski::{minkowski_combine, minkowski_volume};
use bmlab_core::geom::polytope::convex_hull;
use bmlab_core::oracle::{brute_hull_volume, minkowski_direct_boxes, sweep_union_volume, BoxList, DEFAULT_PAIR_CAP};
use bmlab_core::partition::{cone_measures, slice_counts, steiner_symmetrize, subdivide_simplex, subset_match_with_tau};
use bmlab_core::rational::{int, rat, Point};
use bmlab_core::{CellSet, ConeFrame, GridSpec, Polytope, Rational, Simplex, Weight};

fn weight() -> impl Strategy<Value = Weight> {
    prop_oneof![Just((1, 2)), Just((1, 3)), Just((1, 4)), Just((2, 3)), Just((3, 5))].prop_map(|(p, q)| Weight::from_ratio(p, q).unwrap())
}

fn grid(dim: usize) -> impl Strategy<Value = GridSpec> {
    (1i64..=4).prop_map(move |n| GridSpec::new(dim, rat(1, n)).unwrap())
}

fn cells_in(g: GridSpec, side: i64, max: usize) -> impl Strategy<Value = CellSet> {
    let d = g.dim;
    prop::collection::vec(prop::array::uniform3(0..side), 1..max).prop_map(move |v| {
        CellSet::new(g.clone(), v.into_iter().map(|mut c| {
            for x in c.iter_mut().skip(d) {
                *x = 0;
            }
            c
        }))
    })
}

/// Two cell sets on a shared random grid of dimension 1..=3.
fn pair() -> impl Strategy<Value = (CellSet, CellSet)> {
    (1usize..=3).prop_flat_map(grid).prop_flat_map(|g| {
        let side = [0, 12, 6, 4][g.dim];
        (cells_in(g.clone(), side, 24), cells_in(g, side, 24))
    })
}

fn single(dim: usize, side: i64, max: usize) -> impl Strategy<Value = CellSet> {
    grid(dim).prop_flat_map(move |g| cells_in(g, side, max))
}

fn set_any_dim() -> impl Strategy<Value = CellSet> {
    prop_oneof![single(1, 14, 12), single(2, 7, 20), single(3, 4, 16)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn combine_is_monotone((a, b) in pair(), extra in prop::collection::vec(prop::array::uniform3(-2i64..8), 0..6), t in weight()) {
        let d = a.dim();
        let more = CellSet::new(a.grid().clone(), extra.into_iter().map(|mut c| { for x in c.iter_mut().skip(d) { *x = 0; } c }));
        let big = a.union(&more).unwrap();
        let small = minkowski_combine(&a, &b, &t).unwrap();
        let large = minkowski_combine(&big, &b, &t).unwrap();
        prop_assert!(small.cells().iter().all(|c| large.contains(c)));
    }

    #[test]
    fn combine_is_translation_equivariant((a, b) in pair(), z in prop::array::uniform3(-5i64..6), t in weight()) {
        let mut z = z;
        for x in z.iter_mut().skip(a.dim()) { *x = 0; }
        let moved = minkowski_combine(&a.translate(&z), &b, &t).unwrap();
        let p = t.p();
        let expected = minkowski_combine(&a, &b, &t).unwrap().translate(&[p * z[0], p * z[1], p * z[2]]);
        prop_assert_eq!(moved, expected);
    }

    #[test]
    fn self_combination_does_not_shrink(a in set_any_dim(), t in weight()) {
        prop_assert!(minkowski_volume(&a, &a, &t).unwrap() >= a.volume());
    }

    #[test]
    fn kernel_matches_oracle((a, b) in pair(), t in weight()) {
        let k = minkowski_volume(&a, &b, &t).unwrap();
        let o = sweep_union_volume(&minkowski_direct_boxes(&a, &b, &t, DEFAULT_PAIR_CAP).unwrap()).unwrap();
        prop_assert_eq!(k, o);
        prop_assert_eq!(convex_hull(&a).unwrap().volume(), brute_hull_volume(&a).unwrap());
    }

    #[test]
    fn set_is_fully_measured_in_its_hull(a in set_any_dim()) {
        let hull = convex_hull(&a).unwrap();
        prop_assert_eq!(region_measure(&a, &hull).unwrap(), a.volume());
    }

    #[test]
    fn fan_triangulation_sums_to_volume(a in prop_oneof![single(2, 7, 20), single(3, 4, 16)]) {
        let hull = convex_hull(&a).unwrap();
        let parts: Rational = hull.fan_triangulation().iter().map(|s| s.volume()).sum();
        prop_assert_eq!(parts, hull.volume());
    }

    #[test]
    fn symdiff_at_zero_shift((a, b) in pair()) {
        let zero: Point = vec![int(0); a.dim()];
        let sd = symdiff_volume(&a, &b, &zero).unwrap();
        let ov = overlap_volume(&a, &b, &zero).unwrap();
        prop_assert_eq!(&ov, &a.intersection(&b).unwrap().volume());
        prop_assert_eq!(&sd, &(a.volume() + b.volume() - ov * int(2)));
        prop_assert_eq!(sd.is_zero(), a == b);
        prop_assert!(symdiff_volume(&a, &a, &zero).unwrap().is_zero());
    }

    #[test]
    fn delta_is_nonnegative((a, b) in pair(), t in weight()) {
        let b = equalize(&b, a.len());
        prop_assert!(!delta_t(&a, &b, &t).unwrap().is_negative());
    }

    #[test]
    fn symdiff_opt_ignores_common_translation((a, b) in pair(), z in prop::array::uniform3(-4i64..5)) {
        let mut z = z;
        for x in z.iter_mut().skip(a.dim()) { *x = 0; }
        let scan = TranslationScan { subdivisions: 2 };
        let r0 = optimal_translation_symdiff(&a, &b, &scan).unwrap();
        let r1 = optimal_translation_symdiff(&a.translate(&z), &b.translate(&z), &scan).unwrap();
        prop_assert_eq!(r0.symdiff, r1.symdiff);
    }

    #[test]
    fn steiner_keeps_slices(a in prop_oneof![single(2, 8, 30), single(3, 5, 30)], axis in 0usize..3) {
        let axis = axis % a.dim();
        let s = steiner_symmetrize(&a, axis).unwrap();
        prop_assert_eq!(s.volume(), a.volume());
        prop_assert_eq!(slice_counts(&s, axis), slice_counts(&a, axis));
    }

    #[test]
    fn sweep_is_order_free_and_monotone(raw in prop::collection::vec((prop::array::uniform3(-6i64..6), prop::array::uniform3(1i64..5)), 1..12), dim in 1usize..=3, extra in (prop::array::uniform3(-6i64..6), prop::array::uniform3(1i64..5))) {
        let mk = |list: &[([i64; 3], [i64; 3])]| {
            let mut bl = BoxList::new(dim);
            for (lo, w) in list {
                bl.push((0..dim).map(|k| rat(lo[k], 3)).collect(), (0..dim).map(|k| rat(lo[k] + w[k], 3)).collect());
            }
            bl
        };
        let v = sweep_union_volume(&mk(&raw)).unwrap();
        let mut rev = raw.clone();
        rev.reverse();
        prop_assert_eq!(&v, &sweep_union_volume(&mk(&rev)).unwrap());
        let mut more = raw.clone();
        more.push(extra);
        prop_assert!(sweep_union_volume(&mk(&more)).unwrap() >= v);
    }
}

fn simplex2() -> impl Strategy<Value = Simplex> {
    prop::array::uniform6(-8i64..9)
        .prop_map(|v| Simplex::new(vec![vec![rat(v[0], 2), rat(v[1], 2)], vec![rat(v[2], 2), rat(v[3], 2)], vec![rat(v[4], 2), rat(v[5], 2)]]))
        .prop_filter_map("degenerate", |s| s.ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cone_measures_sum_to_volume(s in simplex2(), a in single(2, 7, 24), wts in prop::array::uniform3(1i64..5)) {
        let vs = s.vertices();
        let total = wts.iter().sum::<i64>();
        let apex: Point = (0..2).map(|k| (0..3).map(|i| &vs[i][k] * int(wts[i])).sum::<Rational>() / int(total)).collect();
        let frame = ConeFrame::new(apex, s).unwrap();
        let m = cone_measures(&a, &frame).unwrap();
        prop_assert_eq!(m.iter().sum::<Rational>(), a.volume());
    }

    #[test]
    fn subdivision_conserves_volume(s in simplex2(), wts in prop::array::uniform3(1i64..5)) {
        let vs = s.vertices();
        let total = wts.iter().sum::<i64>();
        let x: Point = (0..2).map(|k| (0..3).map(|i| &vs[i][k] * int(wts[i])).sum::<Rational>() / int(total)).collect();
        let kids = subdivide_simplex(&s, &x).unwrap();
        prop_assert_eq!(kids.iter().map(|k| k.volume()).sum::<Rational>(), s.volume());
    }

    #[test]
    fn subset_doubling_within_tau((a, b) in prop_oneof![single(2, 8, 40), single(3, 5, 40)].prop_flat_map(|a| {
        let g = a.grid().clone();
        let side = if a.dim() == 2 { 8 } else { 5 };
        (Just(a), cells_in(g, side, 40))
    }), pts in prop::collection::vec(prop::array::uniform3(0i64..33), 4..7), t in weight()) {
        let b = equalize(&b, a.len());
        let d = a.dim();
        let pts: Vec<Point> = pts.iter().map(|p| (0..d).map(|k| rat(p[k], 16)).collect()).collect();
        let c = Polytope::hull_of(d, &pts).unwrap();
        prop_assume!(!c.is_degenerate());
        let (bp, tau) = subset_match_with_tau(&a, &b, &c, &a.grid().cell_volume()).unwrap();
        let ac = a.filter(|cl| c.contains(&a.center(cl)));
        let lhs = if ac.is_empty() || bp.is_empty() { -ac.volume() } else { minkowski_volume(&ac, &bp, &t).unwrap() - ac.volume() };
        let rhs = minkowski_volume(&a, &b, &t).unwrap() - a.volume();
        prop_assert!(lhs <= rhs + tau);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn freiman_bounds_hold_in_regime(seed in any::<u64>()) {
        let (a, b, t) = random_1d_pair(&mut instance_rng(seed, 0)).unwrap();
        let r = freiman_check_1d(&a, &b, &t).unwrap();
        prop_assert!(!r.delta.is_negative());
        if r.precondition {
            prop_assert!(r.holds_a && r.holds_b);
        }
    }

    #[test]
    fn box_hull_bound_holds(seed in any::<u64>()) {
        let (r, s) = random_box_pair(&mut instance_rng(seed, 1)).unwrap();
        prop_assert!(box_hull_bound_check(&r, &s).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partition_tree_conserves_and_contracts(seed in any::<u64>(), eps_den in 4i64..12) {
        use bmlab_core::families::random_convex;
        use bmlab_core::partition::{linear_partition_process, PartitionOptions};
        let mut rng = instance_rng(seed, 2);
        let g = GridSpec::new(2, rat(1, 8)).unwrap();
        let a = random_convex(&mut rng, &g, 24, 6).unwrap().filter(|c| (c[0] / 3 + c[1] / 3) % 4 != 0);
        prop_assume!(!a.is_empty() && !convex_hull(&a).unwrap().is_degenerate());
        let tree = linear_partition_process(&a, &Weight::from_ratio(1, 2).unwrap(), &rat(1, eps_den), &PartitionOptions::with_depth(3)).unwrap();
        prop_assert_eq!(tree.leaf_volume(), convex_hull(&a).unwrap().volume());
        prop_assert!(tree.conserves_volume());
        prop_assert!(tree.splits_ok());
    }
}
