//! `tA + (1-t)B` on the refined lattice.
//!
//! With `t = p/q`, the combination of cells `α` and `β` is the box with lower
//! corner `(h/q)(pα + (q-p)β)` and side `h`, i.e. `q^dim` cells of pitch `h/q`.
//! Working on runs: for runs `[a0,a1)` and `[b0,b1)` along the last axis the
//! anchors `p·i + (q-p)·j` are spaced by at most `max(p, q-p) < q`, so the
//! union of their length-`q` intervals is the single interval
//! `[p·a0 + (q-p)·b0, p·(a1-1) + (q-p)·(b1-1) + q)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::Result;
use crate::geom::cell::{cell_from_line, Cell, CellSet, Line, Weight};
use crate::rational::Rational;

/// Merged last-axis intervals per refined line key.
fn combined_lines(a: &CellSet, b: &CellSet, t: &Weight) -> Vec<([i64; 2], Vec<(i64, i64)>)> {
    let d = a.dim();
    let (p, q) = (t.p(), t.q());
    let r = q - p;
    let la = a.lines();
    let lb = b.lines();
    let lead = d - 1;

    // Offsets e in [0,q)^(d-1) for the leading axes.
    let mut offsets = vec![[0i64; 2]];
    for axis in 0..lead {
        offsets = offsets
            .into_iter()
            .flat_map(|o| {
                (0..q).map(move |e| {
                    let mut n = o;
                    n[axis] = e;
                    n
                })
            })
            .collect();
    }

    let per_a: Vec<HashMap<[i64; 2], Vec<(i64, i64)>>> = la
        .par_iter()
        .map(|line_a: &Line| {
            let mut local: HashMap<[i64; 2], Vec<(i64, i64)>> = HashMap::new();
            for line_b in &lb {
                let base = [p * line_a.key[0] + r * line_b.key[0], p * line_a.key[1] + r * line_b.key[1]];
                let mut ivs = Vec::with_capacity(line_a.runs.len() * line_b.runs.len());
                for ra in &line_a.runs {
                    for rb in &line_b.runs {
                        ivs.push((p * ra.lo + r * rb.lo, p * (ra.hi - 1) + r * (rb.hi - 1) + q));
                    }
                }
                for o in &offsets {
                    let key = [base[0] + o[0], base[1] + o[1]];
                    local.entry(key).or_default().extend_from_slice(&ivs);
                }
            }
            for v in local.values_mut() {
                merge_intervals(v);
            }
            local
        })
        .collect();

    let mut all: HashMap<[i64; 2], Vec<(i64, i64)>> = HashMap::new();
    for m in per_a {
        for (k, v) in m {
            all.entry(k).or_default().extend(v);
        }
    }
    let mut out: Vec<([i64; 2], Vec<(i64, i64)>)> = all
        .into_iter()
        .map(|(k, mut v)| {
            merge_intervals(&mut v);
            (k, v)
        })
        .collect();
    out.sort_unstable_by_key(|(k, _)| *k);
    out
}

/// Sorts and merges half-open intervals that overlap or touch.
fn merge_intervals(v: &mut Vec<(i64, i64)>) {
    v.sort_unstable();
    let mut w = 0;
    for i in 0..v.len() {
        if w > 0 && v[i].0 <= v[w - 1].1 {
            v[w - 1].1 = v[w - 1].1.max(v[i].1);
        } else {
            v[w] = v[i];
            w += 1;
        }
    }
    v.truncate(w);
}

/// The exact set `tA + (1-t)B` as cells of pitch `h/q`.
pub fn minkowski_combine(a: &CellSet, b: &CellSet, t: &Weight) -> Result<CellSet> {
    a.grid().check_same(b.grid())?;
    let grid = a.grid().refined(t.q() as u64);
    let d = a.dim();
    let mut cells: Vec<Cell> = Vec::new();
    for (key, ivs) in combined_lines(a, b, t) {
        for (lo, hi) in ivs {
            cells.extend((lo..hi).map(|x| cell_from_line(d, key, x)));
        }
    }
    Ok(CellSet::from_sorted(grid, cells))
}

/// `|tA + (1-t)B|` without materializing the cells.
pub fn minkowski_volume(a: &CellSet, b: &CellSet, t: &Weight) -> Result<Rational> {
    a.grid().check_same(b.grid())?;
    let count: i64 = combined_lines(a, b, t).iter().flat_map(|(_, v)| v.iter()).map(|(lo, hi)| hi - lo).sum();
    let grid = a.grid().refined(t.q() as u64);
    Ok(grid.cell_volume() * Rational::from_integer(BigInt::from(count)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::cell::GridSpec;
    use crate::rational::{int, rat};

    fn brute(a: &CellSet, b: &CellSet, t: &Weight) -> CellSet {
        let (p, q) = (t.p(), t.q());
        let d = a.dim();
        let mut cells = Vec::new();
        for ca in a.cells() {
            for cb in b.cells() {
                let anchor: Vec<i64> = (0..3).map(|k| p * ca[k] + (q - p) * cb[k]).collect();
                let span = |k: usize| if k < d { q } else { 1 };
                for x in 0..span(0) {
                    for y in 0..span(1) {
                        for z in 0..span(2) {
                            cells.push([anchor[0] + x, anchor[1] + y, anchor[2] + z]);
                        }
                    }
                }
            }
        }
        CellSet::new(a.grid().refined(q as u64), cells)
    }

    #[test]
    fn single_cell_is_convex_fixed_point() {
        let g = GridSpec::unit(2);
        let a = CellSet::new(g, [[0, 0, 0]]);
        let half = Weight::from_ratio(1, 2).unwrap();
        let m = minkowski_combine(&a, &a, &half).unwrap();
        assert_eq!(m.volume(), int(1));
        assert_eq!(m.canonicalize(), a);
    }

    #[test]
    fn gapped_interval_fills_in() {
        let a = CellSet::new(GridSpec::unit(1), [[0, 0, 0], [2, 0, 0]]);
        let half = Weight::from_ratio(1, 2).unwrap();
        assert_eq!(minkowski_volume(&a, &a, &half).unwrap(), int(3));
    }

    #[test]
    fn sharp_boxes() {
        let g = GridSpec::new(2, rat(1, 5)).unwrap();
        let a = CellSet::block(g.clone(), &[0, 0], &[6, 5]);
        let b = CellSet::block(g, &[0, 0], &[5, 6]);
        let half = Weight::from_ratio(1, 2).unwrap();
        assert_eq!(minkowski_volume(&a, &b, &half).unwrap(), rat(121, 100));
    }

    #[test]
    fn matches_pairwise_enumeration() {
        let g = GridSpec::unit(3);
        let a = CellSet::new(g.clone(), [[0, 0, 0], [2, 1, 0], [0, 0, 3], [1, 1, 1]]);
        let b = CellSet::new(g, [[0, 0, 0], [0, 2, 2], [3, 0, 1]]);
        for (p, q) in [(1, 2), (1, 3), (2, 3), (3, 4)] {
            let t = Weight::from_ratio(p, q).unwrap();
            assert_eq!(minkowski_combine(&a, &b, &t).unwrap(), brute(&a, &b, &t));
        }
    }

    #[test]
    fn grid_mismatch() {
        let a = CellSet::new(GridSpec::unit(1), [[0, 0, 0]]);
        let b = CellSet::new(GridSpec::unit(2), [[0, 0, 0]]);
        assert!(minkowski_combine(&a, &b, &Weight::from_ratio(1, 2).unwrap()).is_err());
    }
}
