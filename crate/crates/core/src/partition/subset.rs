use std::collections::BTreeSet;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geom::cell::{Cell, CellSet};
use crate::geom::measure::{measure_in_halfspaces, CellClass, CellClassifier};
use crate::geom::polytope::{HalfSpace, Polytope};
use crate::rational::{dot, Rational};

/// A subset `B' ⊆ B` with `|B'|` within `tol` of `|A ∩ C|`, cut out by half-spaces
/// parallel to the facets of `C`.
///
/// Facet by facet, `A_i = A ∩ H_1 ∩ … ∩ H_i` is measured exactly and `B_i` keeps
/// the cells of `B_{i-1}` lowest along the facet normal (ties lexicographic),
/// as many as `|A_i|` rounds to. Whole cells make `tol` below one cell volume
/// unreachable in general, so that is rejected.
pub fn subset_match(a: &CellSet, b: &CellSet, c: &Polytope, tol: &Rational) -> Result<CellSet> {
    subset_match_with_tau(a, b, c, tol).map(|(s, _)| s)
}

/// [`subset_match`] together with the cut tolerance
/// `τ = (cells of A cut by ∂C + cells of B cut by the selection thresholds)·h^dim`.
///
/// The threshold of a facet step is the plane parallel to the facet through
/// the center of the last kept cell.
pub fn subset_match_with_tau(a: &CellSet, b: &CellSet, c: &Polytope, tol: &Rational) -> Result<(CellSet, Rational)> {
    a.grid().check_same(b.grid())?;
    if a.volume() != b.volume() {
        return Err(Error::UnequalVolumes { a: a.volume().to_string(), b: b.volume().to_string() });
    }
    let cell = a.grid().cell_volume();
    if *tol < cell {
        return Err(Error::ToleranceTooSmall { tol: tol.to_string(), cell: cell.to_string() });
    }
    if c.is_degenerate() {
        return Ok((CellSet::empty(b.grid().clone()), Rational::zero()));
    }
    let mut current: Vec<Cell> = b.cells().to_vec();
    let mut applied = Vec::new();
    let mut b_cut = BTreeSet::new();
    for facet in c.facets() {
        applied.push(facet.clone());
        let target = measure_in_halfspaces(a, &applied) / &cell;
        let keep = target.round().to_integer().to_usize().unwrap_or(0).min(current.len());
        let mut keyed: Vec<(Rational, Cell)> = current.iter().map(|cl| (dot(&facet.normal, &b.center(cl)), *cl)).collect();
        keyed.sort();
        if keep > 0 {
            let plane = HalfSpace { normal: facet.normal.clone(), offset: keyed[keep - 1].0.clone() };
            let cls = CellClassifier::new(b.dim(), b.pitch(), std::slice::from_ref(&plane));
            b_cut.extend(keyed.iter().map(|(_, cl)| *cl).filter(|cl| cls.classify(cl) == CellClass::Cut));
        }
        current = keyed.into_iter().take(keep).map(|(_, cl)| cl).collect();
    }
    let out = CellSet::new(b.grid().clone(), current);
    debug_assert!((out.volume() - measure_in_halfspaces(a, c.facets())).abs() <= *tol || out.volume().is_zero());
    let boundary: Vec<CellClassifier> = c.facets().iter().map(|f| CellClassifier::new(a.dim(), a.pitch(), std::slice::from_ref(f))).collect();
    let a_cut = a.cells().iter().filter(|cl| boundary.iter().any(|k| k.classify(cl) == CellClass::Cut)).count();
    let tau = Rational::from_integer((a_cut + b_cut.len()).into()) * cell;
    Ok((out, tau))
}
