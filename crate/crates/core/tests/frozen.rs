//! Values computed outside this crate (exact fraction arithmetic, polygon
//! clipping, box painting, scipy hulls) and frozen here.

use bmlab_core::deficits::{deficit_report, delta_t, optimal_translation_symdiff, TranslationScan};
use bmlab_core::families::sharp_pair;
use bmlab_core::geom::minkowski::minkowski_volume;
use bmlab_core::geom::polytope::convex_hull;
use bmlab_core::oracle::{brute_hull_volume, minkowski_direct_boxes, sweep_union_volume, DEFAULT_PAIR_CAP};
use bmlab_core::partition::{cone_measures, kkm_cone_translate, kkm_residual, KkmOptions};
use bmlab_core::rational::{int, point, rat};
use bmlab_core::{CellSet, ConeFrame, GridSpec, Rational, Simplex, Weight};

fn frame(apex: (i64, i64, i64, i64)) -> ConeFrame {
    let s = Simplex::new(vec![point(&[(0, 1), (0, 1)]), point(&[(2, 1), (0, 1)]), point(&[(0, 1), (2, 1)])]).unwrap();
    ConeFrame::new(point(&[(apex.0, apex.1), (apex.2, apex.3)]), s).unwrap()
}

#[test]
fn cone_measures_of_unit_square() {
    let s = CellSet::block(GridSpec::new(2, rat(1, 4)).unwrap(), &[0, 0], &[4, 4]);
    let m = cone_measures(&s, &frame((1, 2, 1, 2))).unwrap();
    assert_eq!(m, vec![rat(1, 3), rat(1, 3), rat(1, 3)]);
}

#[test]
fn cone_measures_of_l_shape_off_center() {
    let g = GridSpec::new(2, rat(1, 4)).unwrap();
    let s = CellSet::block(g.clone(), &[0, 0], &[4, 2]).union(&CellSet::block(g, &[0, 2], &[2, 4])).unwrap();
    let m = cone_measures(&s, &frame((1, 3, 1, 5))).unwrap();
    assert_eq!(m, vec![rat(997, 2700), rat(13, 54), rat(7, 50)]);
    assert_eq!(m.iter().sum::<Rational>(), rat(3, 4));
}

#[test]
fn sharp_family_table() {
    let t = Weight::from_ratio(1, 2).unwrap();
    let expected = [rat(1, 24), rat(1, 80), rat(1, 288), rat(1, 1088), rat(1, 4224), rat(1, 16640)];
    for (k, want) in (1..=6).zip(expected) {
        let n = 1i64 << k;
        let (a, b) = sharp_pair(2, n).unwrap();
        assert_eq!(delta_t(&a, &b, &t).unwrap(), want, "h = 1/{n}");
        let sd = optimal_translation_symdiff(&a, &b, &TranslationScan::default()).unwrap().symdiff;
        assert_eq!(sd, rat(2, n), "h = 1/{n}");
    }
}

#[test]
fn sharp_instance_report_row() {
    let (a, b) = sharp_pair(2, 5).unwrap();
    let r = deficit_report(&a, &b, &Weight::from_ratio(1, 2).unwrap()).unwrap();
    assert_eq!(r.delta_t, rat(1, 120));
    assert_eq!(r.symdiff_opt, rat(2, 5));
    assert_eq!(r.shift, vec![int(0), int(0)]);
    assert_eq!(r.hull_gap_a, int(0));
}

fn cells(g: &GridSpec, cs: &[[i64; 3]]) -> CellSet {
    CellSet::new(g.clone(), cs.iter().copied())
}

#[test]
fn scattered_sets_minkowski_and_hulls() {
    let g2 = GridSpec::new(2, rat(1, 3)).unwrap();
    let a2 = cells(&g2, &[[0, 0, 0], [1, 0, 0], [3, 0, 0], [0, 2, 0], [2, 3, 0]]);
    let b2 = cells(&g2, &[[0, 0, 0], [0, 1, 0], [2, 2, 0], [4, 1, 0]]);
    let t = Weight::from_ratio(1, 3).unwrap();
    assert_eq!(minkowski_volume(&a2, &b2, &t).unwrap(), rat(94, 81));
    assert_eq!(convex_hull(&a2).unwrap().volume(), rat(3, 2));
    assert_eq!(convex_hull(&b2).unwrap().volume(), rat(11, 9));

    let g3 = GridSpec::new(3, rat(1, 2)).unwrap();
    let a3 = cells(&g3, &[[0, 0, 0], [1, 1, 0], [0, 2, 1], [2, 0, 2]]);
    let b3 = cells(&g3, &[[0, 0, 0], [1, 0, 1], [0, 1, 3]]);
    let t = Weight::from_ratio(1, 4).unwrap();
    assert_eq!(minkowski_volume(&a3, &b3, &t).unwrap(), rat(111, 128));
    assert_eq!(convex_hull(&a3).unwrap().volume(), rat(29, 16));
    assert_eq!(convex_hull(&b3).unwrap().volume(), rat(17, 16));

    // The oracle path lands on the same numbers.
    let boxes = minkowski_direct_boxes(&a3, &b3, &t, DEFAULT_PAIR_CAP).unwrap();
    assert_eq!(sweep_union_volume(&boxes).unwrap(), rat(111, 128));
    assert_eq!(brute_hull_volume(&a3).unwrap(), rat(29, 16));
}

#[test]
fn cone_balancing_finds_lattice_shift() {
    let g = GridSpec::new(2, rat(1, 8)).unwrap();
    let a = CellSet::block(g.clone(), &[0, 0], &[6, 5]).union(&CellSet::block(g, &[1, 5], &[5, 7])).unwrap();
    let b = a.translate(&[3, 2, 0]);
    let f = frame((1, 3, 3, 8));
    let tol = rat(1, 1_000_000);
    let r = kkm_cone_translate(&a, &b, &f, &tol, &KkmOptions::default()).unwrap();
    assert!(r.residual <= &tol * a.volume());

    // Exhaustive scan of lattice shifts: exact zeros include -(3,2)h.
    let targets = cone_measures(&a, &f).unwrap();
    let h = a.pitch();
    let zeros: Vec<(i64, i64)> = (-6..=0)
        .flat_map(|x| (-5..=1).map(move |y| (x, y)))
        .filter(|&(x, y)| kkm_residual(&targets, &b, &f, &[h * int(x), h * int(y)]) == int(0))
        .collect();
    assert!(zeros.contains(&(-3, -2)), "{zeros:?}");
}
