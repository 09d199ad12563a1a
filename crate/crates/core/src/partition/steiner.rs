use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geom::cell::{Cell, CellSet};

/// Discrete Steiner symmetrization about the coordinate axis `axis`.
///
/// Each slice of fixed `axis` coordinate keeps its cell count, with the cells
/// moved to those whose centers are closest to the axis line (ties broken
/// lexicographically).
pub fn steiner_symmetrize(a: &CellSet, axis: usize) -> Result<CellSet> {
    let d = a.dim();
    if d < 2 {
        return Err(Error::Invalid("Steiner symmetrization needs dim >= 2".into()));
    }
    if axis >= d {
        return Err(Error::Invalid(format!("axis {axis} out of range for dim {d}")));
    }
    let counts = slice_counts(a, axis);
    let max_count = counts.values().copied().max().unwrap_or(0) as i64;
    // The candidate window must contain the disc of the `max_count` nearest
    // cells; radius r with r^(d-1) >= max_count is comfortably enough.
    let mut r: i64 = 1;
    while r.pow((d - 1) as u32) < max_count {
        r += 1;
    }
    let others: Vec<usize> = (0..d).filter(|&k| k != axis).collect();
    // Ordered by squared distance of the center to the axis: Σ (2c_j + 1)^2.
    let mut offsets: Vec<(i64, Cell)> = Vec::new();
    let span: Vec<i64> = (-r..r).collect();
    let mut push = |c: Cell| {
        let key: i64 = others.iter().map(|&k| (2 * c[k] + 1).pow(2)).sum();
        offsets.push((key, c));
    };
    for &x in &span {
        if others.len() == 1 {
            let mut c = [0i64; 3];
            c[others[0]] = x;
            push(c);
        } else {
            for &y in &span {
                let mut c = [0i64; 3];
                c[others[0]] = x;
                c[others[1]] = y;
                push(c);
            }
        }
    }
    offsets.sort();
    let mut cells = Vec::with_capacity(a.len());
    for (&level, &n) in &counts {
        for (_, off) in offsets.iter().take(n) {
            let mut c = *off;
            c[axis] = level;
            cells.push(c);
        }
    }
    Ok(CellSet::new(a.grid().clone(), cells))
}

/// Cell counts per slice of fixed `axis` coordinate.
pub fn slice_counts(a: &CellSet, axis: usize) -> BTreeMap<i64, usize> {
    let mut counts = BTreeMap::new();
    for c in a.cells() {
        *counts.entry(c[axis]).or_default() += 1;
    }
    counts
}
