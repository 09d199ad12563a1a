//! Stability functionals: doubling deficit, hull gaps, common-hull ratio and the
//! optimal-translation symmetric difference, plus the exact classical bounds.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::cell::{CellSet, Weight};
use crate::geom::measure::{overlap_volume, region_measure};
use crate::geom::minkowski::minkowski_volume;
use crate::geom::polytope::{convex_hull, Polytope};
use crate::rational::{format_rational, int, Point, Rational};

fn big(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn require_equal_volumes(a: &CellSet, b: &CellSet) -> Result<Rational> {
    a.grid().check_same(b.grid())?;
    let (va, vb) = (a.volume(), b.volume());
    if va != vb {
        return Err(Error::UnequalVolumes { a: va.to_string(), b: vb.to_string() });
    }
    if va.is_zero() {
        return Err(Error::Empty("sets must have positive volume"));
    }
    Ok(va)
}

/// `δ_t(A,B) = |tA + (1-t)B| / |A| - 1` for equal-volume sets.
///
/// A negative result would contradict Brunn-Minkowski and is reported as an error.
pub fn delta_t(a: &CellSet, b: &CellSet, t: &Weight) -> Result<Rational> {
    let va = require_equal_volumes(a, b)?;
    let d = minkowski_volume(a, b, t)? / va - Rational::one();
    if d.is_negative() {
        return Err(Error::NegativeDeficit(d.to_string()));
    }
    Ok(d)
}

/// `|co(A)| - |A|`.
pub fn hull_gap(a: &CellSet) -> Result<Rational> {
    Ok(convex_hull(a)?.volume() - a.volume())
}

/// Returns `(|co(X∪Y)| / min(|X|,|Y|) - 1, |X△Y| / |X∩Y|)`.
pub fn common_hull_ratio(x: &CellSet, y: &CellSet) -> Result<(Rational, Rational)> {
    let both = x.intersection(y)?;
    if both.is_empty() {
        return Err(Error::Precondition("sets do not overlap".into()));
    }
    let union = x.union(y)?;
    let hull = convex_hull(&union)?.volume();
    let lhs = hull / x.volume().min(y.volume()) - Rational::one();
    let sym = union.volume() - both.volume();
    Ok((lhs, sym / both.volume()))
}

/// Lattice correlation `C(k) = #{β ∈ B : β + k ∈ A}` for every integer shift
/// `k` where it can be nonzero.
#[derive(Debug, Clone)]
pub struct Correlation {
    dim: usize,
    lo: [i64; 3],
    extent: [usize; 3],
    counts: Vec<i64>,
}

impl Correlation {
    pub fn get(&self, k: &[i64; 3]) -> i64 {
        let mut idx = 0usize;
        for axis in 0..self.dim {
            let off = k[axis] - self.lo[axis];
            if off < 0 || off as usize >= self.extent[axis] {
                return 0;
            }
            idx = idx * self.extent[axis] + off as usize;
        }
        self.counts[idx]
    }

    /// All `(shift, count)` pairs in lexicographic shift order.
    pub fn iter(&self) -> impl Iterator<Item = ([i64; 3], i64)> + '_ {
        let d = self.dim;
        self.counts.iter().enumerate().map(move |(mut idx, &c)| {
            let mut k = [0i64; 3];
            for axis in (0..d).rev() {
                k[axis] = self.lo[axis] + (idx % self.extent[axis]) as i64;
                idx /= self.extent[axis];
            }
            (k, c)
        })
    }
}

/// Computes the lattice correlation from run pairs. For runs `[a0,a1)` and
/// `[b0,b1)` the overlap as a function of the last-axis shift is a trapezoid
/// whose second difference is `+1, -1, -1, +1` at `a0-b1, a0-b0, a1-b1, a1-b0`.
pub fn correlation(a: &CellSet, b: &CellSet) -> Result<Correlation> {
    a.grid().check_same(b.grid())?;
    let d = a.dim();
    let (Some((alo, ahi)), Some((blo, bhi))) = (a.bounds(), b.bounds()) else {
        return Err(Error::Empty("correlation of an empty set"));
    };
    let mut lo = [0i64; 3];
    let mut extent = [1usize; 3];
    for axis in 0..d - 1 {
        lo[axis] = alo[axis] - bhi[axis];
        extent[axis] = (ahi[axis] - blo[axis] - lo[axis] + 1) as usize;
    }
    let last = d - 1;
    // Second-difference buffer along the last axis, with one slot of slack on each side.
    let klo = alo[last] - bhi[last] - 1;
    let len = (ahi[last] + 1 - blo[last] - klo + 1) as usize;
    let rows: usize = extent[..last].iter().product();
    let mut diff = vec![0i64; rows * len];
    let la = a.lines();
    let lb = b.lines();
    for line_a in &la {
        for line_b in &lb {
            let mut row = 0usize;
            for axis in 0..last {
                row = row * extent[axis] + (line_a.key[axis] - line_b.key[axis] - lo[axis]) as usize;
            }
            let base = row * len;
            for ra in &line_a.runs {
                for rb in &line_b.runs {
                    diff[base + (ra.lo - rb.hi - klo) as usize] += 1;
                    diff[base + (ra.lo - rb.lo - klo) as usize] -= 1;
                    diff[base + (ra.hi - rb.hi - klo) as usize] -= 1;
                    diff[base + (ra.hi - rb.lo - klo) as usize] += 1;
                }
            }
        }
    }
    lo[last] = klo;
    extent[last] = len;
    let mut counts = vec![0i64; rows * len];
    for r in 0..rows {
        let (mut slope, mut value) = (0i64, 0i64);
        for i in 0..len {
            counts[r * len + i] = value;
            slope += diff[r * len + i];
            value += slope;
        }
    }
    Ok(Correlation { dim: d, lo, extent, counts })
}

/// Search settings for [`optimal_translation_symdiff`].
#[derive(Debug, Clone)]
pub struct TranslationScan {
    /// Each coordinate is probed at `±j·h/subdivisions` around the lattice optimum.
    pub subdivisions: u32,
}

impl Default for TranslationScan {
    fn default() -> Self {
        TranslationScan { subdivisions: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationResult {
    pub shift: Point,
    pub symdiff: Rational,
}

fn norm_sq(k: &[i64; 3]) -> i64 {
    k.iter().map(|x| x * x).sum()
}

/// Minimizes `|A △ (B + x)|` over shifts `x`.
///
/// The overlap `|A ∩ (B + x)|` is multilinear in `x` on every lattice box, so
/// the exhaustive lattice scan already finds the global minimum; the rational
/// refinement only confirms local optimality. Ties go to the shortest shift,
/// then lexicographically smallest.
pub fn optimal_translation_symdiff(a: &CellSet, b: &CellSet, scan: &TranslationScan) -> Result<TranslationResult> {
    let corr = correlation(a, b)?;
    let d = a.dim();
    let mut best = ([0i64; 3], -1i64);
    for (k, c) in corr.iter() {
        let better = c > best.1
            || (c == best.1 && (norm_sq(&k), k) < (norm_sq(&best.0), best.0));
        if better {
            best = (k, c);
        }
    }
    let h = a.pitch();
    let cell = a.grid().cell_volume();
    let mut shift: Point = (0..d).map(|i| big(best.0[i]) * h).collect();
    let mut overlap = big(best.1) * &cell;
    let n = scan.subdivisions.max(1) as i64;
    let mut improved = true;
    while improved {
        improved = false;
        for axis in 0..d {
            for j in 1..n {
                for sign in [-1, 1] {
                    let mut cand = shift.clone();
                    cand[axis] += Rational::new(BigInt::from(sign * j), BigInt::from(n)) * h;
                    let ov = overlap_volume(a, b, &cand)?;
                    if ov > overlap {
                        overlap = ov;
                        shift = cand;
                        improved = true;
                    }
                }
            }
        }
    }
    let symdiff = a.volume() + b.volume() - overlap * int(2);
    Ok(TranslationResult { shift, symdiff })
}

/// Outcome of the one-dimensional Freiman check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreimanReport {
    pub delta: Rational,
    pub gap_a: Rational,
    pub gap_b: Rational,
    /// `t^{-1} δ |A|`
    pub bound_a: Rational,
    /// `(1-t)^{-1} δ |B|`
    pub bound_b: Rational,
    /// `δ < min(t, 1-t)`; the bounds are only claimed when this holds.
    pub precondition: bool,
    pub holds_a: bool,
    pub holds_b: bool,
}

impl FreimanReport {
    /// True unless the precondition holds and a bound fails.
    pub fn consistent(&self) -> bool {
        !self.precondition || (self.holds_a && self.holds_b)
    }
}

pub fn freiman_check_1d(a: &CellSet, b: &CellSet, t: &Weight) -> Result<FreimanReport> {
    if a.dim() != 1 {
        return Err(Error::Invalid(format!("Freiman check is one-dimensional, got dim {}", a.dim())));
    }
    let delta = delta_t(a, b, t)?;
    let gap_a = hull_gap(a)?;
    let gap_b = hull_gap(b)?;
    let bound_a = &delta * a.volume() / t.t();
    let bound_b = &delta * b.volume() / t.one_minus();
    let precondition = delta < *t.t() && delta < t.one_minus();
    Ok(FreimanReport {
        holds_a: gap_a <= bound_a,
        holds_b: gap_b <= bound_b,
        delta,
        gap_a,
        gap_b,
        bound_a,
        bound_b,
        precondition,
    })
}

/// Axis-aligned box `[lo, hi]` with rational corners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisBox {
    pub lo: Point,
    pub hi: Point,
}

impl AxisBox {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.len() > 3 {
            return Err(Error::Invalid("box corners must have equal length 1..=3".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
            return Err(Error::Degenerate("box has an empty side".into()));
        }
        Ok(AxisBox { lo, hi })
    }

    pub fn volume(&self) -> Rational {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn intersection_volume(&self, other: &AxisBox) -> Rational {
        let mut v = Rational::one();
        for k in 0..self.lo.len() {
            let side = (&self.hi[k]).min(&other.hi[k]) - (&self.lo[k]).max(&other.lo[k]);
            if !side.is_positive() {
                return Rational::zero();
            }
            v *= side;
        }
        v
    }

    pub fn corners(&self) -> Vec<Point> {
        let d = self.lo.len();
        (0..1usize << d)
            .map(|m| (0..d).map(|k| if m >> k & 1 == 1 { self.hi[k].clone() } else { self.lo[k].clone() }).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxHullReport {
    /// `|co(R ∪ T)|`
    pub lhs: Rational,
    /// `2^n |R| |T| / |R ∩ T|`
    pub rhs: Rational,
    pub holds: bool,
}

pub fn box_hull_bound_check(r: &AxisBox, s: &AxisBox) -> Result<BoxHullReport> {
    let d = r.lo.len();
    if s.lo.len() != d {
        return Err(Error::Invalid("boxes of different dimensions".into()));
    }
    let inter = r.intersection_volume(s);
    if inter.is_zero() {
        return Err(Error::Precondition("boxes do not overlap".into()));
    }
    let mut pts = r.corners();
    pts.extend(s.corners());
    let lhs = Polytope::hull_of(d, &pts)?.volume();
    let rhs = big(1 << d) * r.volume() * s.volume() / inter;
    Ok(BoxHullReport { holds: lhs <= rhs, lhs, rhs })
}

/// All stability functionals of one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeficitReport {
    pub t: Weight,
    pub dim: usize,
    pub pitch: Rational,
    pub vol_a: Rational,
    pub vol_b: Rational,
    pub delta_t: Rational,
    pub hull_gap_a: Rational,
    pub hull_gap_b: Rational,
    /// `|co(A ∪ B)| / min(|co A|, |co B|)`
    pub hull_ratio: Rational,
    pub symdiff_opt: Rational,
    pub shift: Point,
}

impl DeficitReport {
    /// Column names of [`DeficitReport::csv_fields`]; shifts beyond `dim` stay empty.
    pub const CSV_COLUMNS: [&'static str; 17] = [
        "scenario_id",
        "dim",
        "t_num",
        "t_den",
        "pitch_num",
        "pitch_den",
        "vol_a",
        "vol_b",
        "delta_t",
        "hull_gap_a",
        "hull_gap_b",
        "hull_ratio",
        "symdiff_opt",
        "shift_x",
        "shift_y",
        "shift_z",
        "runtime_ms",
    ];

    /// One CSV record in the order of [`DeficitReport::CSV_COLUMNS`].
    pub fn csv_fields(&self, scenario_id: &str, runtime_ms: Option<u128>) -> Vec<String> {
        let mut f = vec![
            scenario_id.to_string(),
            self.dim.to_string(),
            self.t.p().to_string(),
            self.t.q().to_string(),
            self.pitch.numer().to_string(),
            self.pitch.denom().to_string(),
        ];
        for r in [&self.vol_a, &self.vol_b, &self.delta_t, &self.hull_gap_a, &self.hull_gap_b, &self.hull_ratio, &self.symdiff_opt] {
            f.push(format_rational(r));
        }
        for k in 0..3 {
            f.push(self.shift.get(k).map(format_rational).unwrap_or_default());
        }
        f.push(runtime_ms.map(|m| m.to_string()).unwrap_or_default());
        f
    }
}

pub fn deficit_report(a: &CellSet, b: &CellSet, t: &Weight) -> Result<DeficitReport> {
    let delta = delta_t(a, b, t)?;
    let hull_a = convex_hull(a)?.volume();
    let hull_b = convex_hull(b)?.volume();
    let hull_union = convex_hull(&a.union(b)?)?.volume();
    let opt = optimal_translation_symdiff(a, b, &TranslationScan::default())?;
    Ok(DeficitReport {
        t: t.clone(),
        dim: a.dim(),
        pitch: a.pitch().clone(),
        vol_a: a.volume(),
        vol_b: b.volume(),
        delta_t: delta,
        hull_gap_a: &hull_a - a.volume(),
        hull_gap_b: &hull_b - b.volume(),
        hull_ratio: hull_union / hull_a.min(hull_b),
        symdiff_opt: opt.symdiff,
        shift: opt.shift,
    })
}

/// Sandwich diagnostic `rS ⊂ X, Y ⊂ RS` for a convex body `S` with the origin
/// in its interior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaReport {
    /// Largest tested `r` with `rS` inside both sets (a lower bound for the true value).
    pub inner: Rational,
    /// Smallest `R` with both hulls inside `RS` (exact).
    pub outer: Rational,
    /// `outer / inner`, absent when no positive inner radius was found.
    pub lambda: Option<Rational>,
}

/// Computes the sandwich radii of `x` and `y` relative to `s`; the inner radius
/// is found by `steps` rounds of bisection.
pub fn lambda_boundedness(x: &CellSet, y: &CellSet, s: &Polytope, steps: u32) -> Result<LambdaReport> {
    if s.is_degenerate() || s.facets().iter().any(|f| !f.offset.is_positive()) {
        return Err(Error::Precondition("S must contain the origin in its interior".into()));
    }
    let mut outer = Rational::zero();
    for set in [x, y] {
        for v in convex_hull(set)?.vertices() {
            for f in s.facets() {
                let ratio = crate::rational::dot(&f.normal, v) / &f.offset;
                if ratio > outer {
                    outer = ratio;
                }
            }
        }
    }
    let scaled = |rho: &Rational| -> Result<Polytope> {
        let pts: Vec<Point> = s.vertices().iter().map(|v| v.iter().map(|c| c * rho).collect()).collect();
        Polytope::hull_of(s.dim(), &pts)
    };
    let inside_both = |rho: &Rational| -> Result<bool> {
        let p = scaled(rho)?;
        let vol = p.volume();
        Ok(region_measure(x, &p)? == vol && region_measure(y, &p)? == vol)
    };
    let (mut lo, mut hi) = (Rational::zero(), outer.clone());
    for _ in 0..steps {
        let mid = (&lo + &hi) / int(2);
        if inside_both(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = if lo.is_positive() { Some(&outer / &lo) } else { None };
    Ok(LambdaReport { inner: lo, outer, lambda })
}
