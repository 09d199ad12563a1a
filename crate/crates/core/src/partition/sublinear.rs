//! Discrete check that doubling is sublinear over the subsimplices of a split.
//!
//! Given a frame of cones from an interior point `x`, a translation `v` that
//! balances `A` and `B` cone by cone is found; then `A_i = A ∩ C_i` and
//! `B_i = B ∩ (C_i - v)` by cell centers. The pieces `tA_i + (1-t)B_i` lie in
//! the essentially disjoint cones `C_i - (1-t)v`, which gives
//! `Σ (|D_t(A_i,B_i)| - |A_i|) <= |D_t(A,B)| - |A|` in the continuum. On cells
//! the pieces can overlap along the cone boundaries; that slack is bounded by
//! `τ`, the number of cells cut by a cone boundary times the cell volume.

use std::collections::BTreeSet;

use num_traits::{ToPrimitive, Zero};

use crate::error::Result;
use crate::geom::cell::{Cell, CellSet, Weight};
use crate::geom::cone::ConeFrame;
use crate::geom::measure::{CellClass, CellClassifier};
use crate::geom::minkowski::{minkowski_combine, minkowski_volume};
use crate::geom::polytope::{HalfSpace, Simplex};
use crate::partition::balance::{kkm_cone_translate, BalanceResult, KkmOptions, Witness};
use crate::rational::{add, dot, int, Point, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublinearityReport {
    pub shift: Point,
    pub kkm: BalanceResult,
    /// `|A_i|` and `|B_i|` per cone.
    pub parts_a: Vec<Rational>,
    pub parts_b: Vec<Rational>,
    /// `Σ (|D_t(A_i,B_i)| - |A_i|)`
    pub lhs: Rational,
    /// `|D_t(A,B)| - |A|`
    pub rhs: Rational,
    /// `Σ |D_t(A_i,B_i)| - |⋃ D_t(A_i,B_i)|`, the actual overlap of the pieces.
    pub overlap: Rational,
    pub cut_cells: usize,
    pub tau: Rational,
}

impl SublinearityReport {
    pub fn holds_exact(&self) -> bool {
        self.lhs <= self.rhs
    }

    pub fn holds_with_tau(&self) -> bool {
        self.lhs <= &self.rhs + &self.tau
    }
}

fn cut_cells(s: &CellSet, cones: &[Vec<HalfSpace>]) -> BTreeSet<Cell> {
    let mut out = BTreeSet::new();
    for hs in cones {
        let cls = CellClassifier::new(s.dim(), s.pitch(), hs);
        out.extend(s.cells().iter().filter(|c| cls.classify(c) == CellClass::Cut).copied());
    }
    out
}

/// Splits `s` by which cone of `frame` contains each (shifted) cell center.
///
/// With integer normals, `n·((c + 1/2)h + v) <= o` reads
/// `n·(2c + 1) <= floor(2(o - n·v)/h)`, so each test is an integer dot product.
fn split_by_cones(s: &CellSet, frame: &ConeFrame, shift: &[Rational]) -> Vec<CellSet> {
    let n = frame.cones().len();
    let h = s.pitch();
    let fast: Option<Vec<Vec<([i128; 3], i128)>>> = frame
        .cones()
        .iter()
        .map(|hs| {
            hs.iter()
                .map(|hp| {
                    let mut nn = [0i128; 3];
                    for (k, x) in hp.normal.iter().enumerate() {
                        nn[k] = x.to_integer().to_i128().filter(|v| v.abs() < 1 << 60)?;
                    }
                    let bound = (&hp.offset - dot(&hp.normal, shift)) * int(2) / h;
                    Some((nn, bound.floor().to_integer().to_i128()?))
                })
                .collect()
        })
        .collect();
    let mut parts: Vec<Vec<Cell>> = vec![Vec::new(); n];
    for c in s.cells() {
        let i = match &fast {
            Some(cones) => cones
                .iter()
                .position(|hs| hs.iter().all(|(nn, b)| (0..3).map(|k| nn[k] * (2 * c[k] as i128 + 1)).sum::<i128>() <= *b))
                .unwrap_or(0),
            None => frame.locate(&add(&s.center(c), shift)),
        };
        parts[i].push(*c);
    }
    parts.into_iter().map(|cells| CellSet::new(s.grid().clone(), cells)).collect()
}

pub fn sublinearity_check(
    a: &CellSet,
    b: &CellSet,
    t: &Weight,
    simplex: &Simplex,
    x: &Point,
    tol: &Rational,
    opts: &KkmOptions,
) -> Result<SublinearityReport> {
    let frame = ConeFrame::new(x.clone(), simplex.clone())?;
    let kkm = kkm_cone_translate(a, b, &frame, tol, opts)?;
    let Witness::Translation(v) = &kkm.witness else { unreachable!("cone balancing returns a translation") };
    let parts_a = split_by_cones(a, &frame, &vec![Rational::zero(); a.dim()]);
    let parts_b = split_by_cones(b, &frame, v);

    let mut lhs = Rational::zero();
    let mut piece_sum = Rational::zero();
    let mut union: Option<CellSet> = None;
    for (ai, bi) in parts_a.iter().zip(&parts_b) {
        lhs -= ai.volume();
        if ai.is_empty() || bi.is_empty() {
            continue;
        }
        let d = minkowski_combine(ai, bi, t)?;
        lhs += d.volume();
        piece_sum += d.volume();
        union = Some(match union {
            None => d,
            Some(u) => u.union(&d)?,
        });
    }
    let union_vol = union.map(|u| u.volume()).unwrap_or_else(Rational::zero);
    let rhs = minkowski_volume(a, b, t)? - a.volume();

    let shifted: Vec<Vec<HalfSpace>> = frame.cones().iter().map(|hs| hs.iter().map(|h| h.translated_back(v)).collect()).collect();
    let cut = cut_cells(a, frame.cones()).len() + cut_cells(b, &shifted).len();
    let tau = int(cut as i64) * a.grid().cell_volume();
    Ok(SublinearityReport {
        shift: v.clone(),
        parts_a: parts_a.iter().map(|p| p.volume()).collect(),
        parts_b: parts_b.iter().map(|p| p.volume()).collect(),
        kkm,
        lhs,
        rhs,
        overlap: piece_sum - union_vol,
        cut_cells: cut,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::cell::GridSpec;
    use crate::rational::{ipoint, rat};

    #[test]
    fn one_dimensional_split_is_exact() {
        let g = GridSpec::new(1, rat(1, 4)).unwrap();
        let a = CellSet::new(g.clone(), (0..6).chain(9..14).map(|x| [x, 0, 0]));
        let b = CellSet::new(g, (3..8).chain(12..18).map(|x| [x, 0, 0]));
        let s = Simplex::new(vec![ipoint(&[0]), vec![rat(14, 4)]]).unwrap();
        let t = Weight::from_ratio(1, 3).unwrap();
        let rep = sublinearity_check(&a, &b, &t, &s, &vec![rat(5, 4)], &rat(1, 1_000_000), &KkmOptions::default()).unwrap();
        assert_eq!(rep.cut_cells, 0);
        assert_eq!(rep.kkm.residual, int(0));
        assert_eq!(rep.parts_a, rep.parts_b);
        assert!(rep.holds_exact());
        assert_eq!(rep.overlap, int(0));
    }
}
