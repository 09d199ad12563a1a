//! Exact measures of cell sets against half-space intersections, and symmetric
//! differences under rational shifts.
//!
//! Cells are first classified against each half-space with integer arithmetic;
//! only cells cut by a boundary plane are clipped, in cell-local coordinates.

use std::ops::Neg;

use num_bigint::BigInt;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geom::cell::{pow, Cell, CellSet};
use crate::geom::polytope::{HalfSpace, Polytope};
use crate::rational::{floor_i128, ceil_i128, from_i128, primitive_integer, to_f64, Rational};

/// Scalar for the unit-cube clipper: exact rationals, or `f64` for searches.
pub trait Field: Clone + PartialOrd + Num + Neg<Output = Self> {}
impl Field for f64 {}
impl Field for Rational {}

fn fdot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn fabs<T: Field>(x: T) -> T {
    if x < T::zero() {
        -x
    } else {
        x
    }
}

fn lerp<T: Field, const D: usize>(a: &[T; D], b: &[T; D], fa: &T, fb: &T) -> [T; D] {
    let s = fa.clone() / (fa.clone() - fb.clone());
    std::array::from_fn(|k| a[k].clone() + (b[k].clone() - a[k].clone()) * s.clone())
}

/// Sutherland-Hodgman step for one plane `n·x <= b`. Also returns the points
/// created on the plane.
fn clip_polygon<T: Field, const D: usize>(poly: &[[T; D]], n: &[T], b: &T) -> (Vec<[T; D]>, Vec<[T; D]>) {
    let mut out = Vec::new();
    let mut on = Vec::new();
    let k = poly.len();
    for i in 0..k {
        let cur = &poly[i];
        let nxt = &poly[(i + 1) % k];
        let fc = fdot(n, cur) - b.clone();
        let fnx = fdot(n, nxt) - b.clone();
        let zero = T::zero();
        if fc <= zero {
            out.push(cur.clone());
            if fc == zero {
                on.push(cur.clone());
            }
        }
        if (fc < zero && fnx > zero) || (fc > zero && fnx < zero) {
            let p = lerp(cur, nxt, &fc, &fnx);
            on.push(p.clone());
            out.push(p);
        }
    }
    (out, on)
}

fn cross2<T: Field>(o: &[T; 2], a: &[T; 2], b: &[T; 2]) -> T {
    (a[0].clone() - o[0].clone()) * (b[1].clone() - o[1].clone()) - (a[1].clone() - o[1].clone()) * (b[0].clone() - o[0].clone())
}

/// Monotone chain over a partial order; returns the hull cycle as indices.
fn hull_cycle<T: Field>(pts: &[[T; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&i, &j| pts[i].partial_cmp(&pts[j]).unwrap_or(std::cmp::Ordering::Equal));
    idx.dedup_by(|i, j| pts[*i] == pts[*j]);
    if idx.len() < 3 {
        return idx;
    }
    let mut chain: Vec<usize> = Vec::new();
    for pass in 0..2 {
        let start = chain.len();
        let seq: Vec<usize> = if pass == 0 { idx.clone() } else { idx.iter().rev().copied().collect() };
        for i in seq {
            while chain.len() >= start + 2 && cross2(&pts[chain[chain.len() - 2]], &pts[chain[chain.len() - 1]], &pts[i]) <= T::zero() {
                chain.pop();
            }
            chain.push(i);
        }
        chain.pop();
    }
    chain
}

/// Volume of `[0,1]^dim ∩ {n_k·u <= b_k}`.
pub fn clip_cube_volume<T: Field>(dim: usize, planes: &[(Vec<T>, T)]) -> T {
    let (o, i) = (T::zero(), T::one());
    match dim {
        1 => {
            let (mut lo, mut hi) = (o.clone(), i.clone());
            for (n, b) in planes {
                let r = b.clone() / n[0].clone();
                if n[0] > o {
                    if r < hi {
                        hi = r;
                    }
                } else if r > lo {
                    lo = r;
                }
            }
            if hi > lo {
                hi - lo
            } else {
                o
            }
        }
        2 => {
            let mut poly = vec![[o.clone(), o.clone()], [i.clone(), o.clone()], [i.clone(), i.clone()], [o.clone(), i.clone()]];
            for (n, b) in planes {
                poly = clip_polygon(&poly, n, b).0;
                if poly.len() < 3 {
                    return o;
                }
            }
            let mut twice = o.clone();
            for k in 0..poly.len() {
                let (a, c) = (&poly[k], &poly[(k + 1) % poly.len()]);
                twice = twice + a[0].clone() * c[1].clone() - a[1].clone() * c[0].clone();
            }
            fabs(twice) / (i.clone() + i)
        }
        _ => clip_cube_volume_3d(planes),
    }
}

fn clip_cube_volume_3d<T: Field>(planes: &[(Vec<T>, T)]) -> T {
    let (o, l) = (T::zero(), T::one());
    let v = |m: usize| -> [T; 3] { std::array::from_fn(|k| if m >> k & 1 == 1 { l.clone() } else { o.clone() }) };
    let quads = [[0, 2, 6, 4], [1, 5, 7, 3], [0, 4, 5, 1], [2, 3, 7, 6], [0, 1, 3, 2], [4, 6, 7, 5]];
    let mut faces: Vec<Vec<[T; 3]>> = quads.iter().map(|q| q.iter().map(|&m| v(m)).collect()).collect();
    for (n, b) in planes {
        if !faces.iter().flatten().any(|p| fdot(n, p) > b.clone()) {
            continue;
        }
        let mut next = Vec::new();
        let mut cap: Vec<[T; 3]> = Vec::new();
        for f in &faces {
            let (clipped, on) = clip_polygon(f, n, b);
            cap.extend(on);
            if clipped.len() >= 3 {
                next.push(clipped);
            }
        }
        if next.is_empty() {
            return o;
        }
        if cap.len() >= 3 {
            let drop = (0..3)
                .max_by(|&x, &y| fabs(n[x].clone()).partial_cmp(&fabs(n[y].clone())).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap_or(0);
            let proj: Vec<[T; 2]> = cap
                .iter()
                .map(|p| {
                    let mut it = (0..3).filter(|&k| k != drop).map(|k| p[k].clone());
                    [it.next().unwrap_or(o.clone()), it.next().unwrap_or(o.clone())]
                })
                .collect();
            let cyc = hull_cycle(&proj);
            if cyc.len() >= 3 {
                next.push(cyc.into_iter().map(|k| cap[k].clone()).collect());
            }
        }
        faces = next;
    }
    let r = faces[0][0].clone();
    let mut six = o.clone();
    for f in &faces {
        for k in 1..f.len() - 1 {
            let a: Vec<T> = (0..3).map(|j| f[0][j].clone() - r[j].clone()).collect();
            let b: Vec<T> = (0..3).map(|j| f[k][j].clone() - r[j].clone()).collect();
            let c: Vec<T> = (0..3).map(|j| f[k + 1][j].clone() - r[j].clone()).collect();
            let det = a[0].clone() * (b[1].clone() * c[2].clone() - b[2].clone() * c[1].clone())
                - a[1].clone() * (b[0].clone() * c[2].clone() - b[2].clone() * c[0].clone())
                + a[2].clone() * (b[0].clone() * c[1].clone() - b[1].clone() * c[0].clone());
            six = six + fabs(det);
        }
    }
    let two = l.clone() + l.clone();
    six / (two.clone() * (two + l))
}

/// A half-space in cell units: `N·(c + u) <= beta` for cell `c`, `u ∈ [0,1]^d`.
struct CellFacet {
    normal: Vec<Rational>,
    beta: Rational,
    small: Option<SmallFacet>,
    lo: Rational,
    hi: Rational,
}

struct SmallFacet {
    n: [i128; 3],
    lo: i128,
    hi: i128,
    floor_beta: i128,
    ceil_beta: i128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellClass {
    Inside,
    Outside,
    Cut,
}

/// Classifies lattice cells of a fixed grid against a list of half-spaces.
pub struct CellClassifier {
    dim: usize,
    facets: Vec<CellFacet>,
}

impl CellClassifier {
    pub fn new(dim: usize, pitch: &Rational, hs: &[HalfSpace]) -> Self {
        let facets = hs
            .iter()
            .map(|h| {
                let (ints, f) = primitive_integer(&h.normal);
                let beta = &h.offset * &f / pitch;
                let normal: Vec<Rational> = ints.iter().cloned().map(Rational::from_integer).collect();
                let lo: Rational = normal.iter().filter(|x| x.is_negative()).cloned().sum();
                let hi: Rational = normal.iter().filter(|x| x.is_positive()).cloned().sum();
                let small = (|| {
                    let mut n = [0i128; 3];
                    for (k, x) in ints.iter().enumerate() {
                        n[k] = x.to_i128()?;
                        if n[k].abs() > 1 << 60 {
                            return None;
                        }
                    }
                    let floor_beta = floor_i128(&beta)?;
                    let ceil_beta = ceil_i128(&beta)?;
                    Some(SmallFacet {
                        lo: n.iter().filter(|&&x| x < 0).sum(),
                        hi: n.iter().filter(|&&x| x > 0).sum(),
                        n,
                        floor_beta,
                        ceil_beta,
                    })
                })();
                CellFacet { normal, beta, small, lo, hi }
            })
            .collect();
        CellClassifier { dim, facets }
    }

    fn classify_facet(&self, f: &CellFacet, c: &Cell) -> CellClass {
        if let Some(s) = &f.small {
            let v = s.n[0] * c[0] as i128 + s.n[1] * c[1] as i128 + s.n[2] * c[2] as i128;
            if v + s.hi <= s.floor_beta {
                return CellClass::Inside;
            }
            if v + s.lo >= s.ceil_beta {
                return CellClass::Outside;
            }
            return CellClass::Cut;
        }
        let v: Rational = (0..self.dim).map(|k| &f.normal[k] * Rational::from_integer(BigInt::from(c[k]))).sum();
        if &v + &f.hi <= f.beta {
            CellClass::Inside
        } else if &v + &f.lo >= f.beta {
            CellClass::Outside
        } else {
            CellClass::Cut
        }
    }

    pub fn classify(&self, c: &Cell) -> CellClass {
        let mut cut = false;
        for f in &self.facets {
            match self.classify_facet(f, c) {
                CellClass::Outside => return CellClass::Outside,
                CellClass::Cut => cut = true,
                CellClass::Inside => {}
            }
        }
        if cut {
            CellClass::Cut
        } else {
            CellClass::Inside
        }
    }

    /// Fraction of the cell inside all half-spaces, in `[0, 1]`.
    pub fn fraction(&self, c: &Cell) -> Rational {
        let mut planes = Vec::new();
        for f in &self.facets {
            match self.classify_facet(f, c) {
                CellClass::Outside => return Rational::zero(),
                CellClass::Inside => {}
                CellClass::Cut => {
                    let nc: Rational = (0..self.dim).map(|k| &f.normal[k] * from_i128(c[k] as i128)).sum();
                    planes.push((f.normal[..self.dim].to_vec(), &f.beta - nc));
                }
            }
        }
        if planes.is_empty() {
            return Rational::one();
        }
        clip_cube_volume(self.dim, &planes)
    }
}

/// Exact `|s ∩ ⋂ hs|`.
pub fn measure_in_halfspaces(s: &CellSet, hs: &[HalfSpace]) -> Rational {
    let cls = CellClassifier::new(s.dim(), s.pitch(), hs);
    let mut whole: i64 = 0;
    let mut partial = Rational::zero();
    for c in s.cells() {
        match cls.classify(c) {
            CellClass::Inside => whole += 1,
            CellClass::Outside => {}
            CellClass::Cut => partial += cls.fraction(c),
        }
    }
    (partial + Rational::from_integer(BigInt::from(whole))) * s.grid().cell_volume()
}

/// Number of cells of `s` cut by the boundary of `⋂ hs`.
pub fn cut_cell_count(s: &CellSet, hs: &[HalfSpace]) -> usize {
    let cls = CellClassifier::new(s.dim(), s.pitch(), hs);
    s.cells().iter().filter(|c| cls.classify(c) == CellClass::Cut).count()
}

/// Exact `|s ∩ p|`; zero for empty or degenerate `p`.
pub fn region_measure(s: &CellSet, p: &Polytope) -> Result<Rational> {
    if s.dim() != p.dim() {
        return Err(Error::GridMismatch(format!("set dim {} vs polytope dim {}", s.dim(), p.dim())));
    }
    if p.is_degenerate() {
        return Ok(Rational::zero());
    }
    Ok(measure_in_halfspaces(s, p.facets()))
}

/// Half-spaces in floating point, for searches that are certified exactly afterwards.
#[derive(Debug, Clone)]
pub struct HalfSpaceF64 {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl HalfSpaceF64 {
    pub fn from_exact(h: &HalfSpace) -> Self {
        let mut normal = [0.0; 3];
        for (k, x) in h.normal.iter().enumerate() {
            normal[k] = to_f64(x);
        }
        HalfSpaceF64 { normal, offset: to_f64(&h.offset) }
    }
}

/// Floating-point `|s ∩ ⋂ hs|`.
pub fn measure_in_halfspaces_f64(s: &CellSet, hs: &[HalfSpaceF64]) -> f64 {
    let d = s.dim();
    let h = to_f64(s.pitch());
    // Cell units: N·u <= beta with N = h·n.
    let local: Vec<([f64; 3], f64, f64, f64)> = hs
        .iter()
        .map(|f| {
            let n = [f.normal[0] * h, f.normal[1] * h, f.normal[2] * h];
            let lo: f64 = n[..d].iter().filter(|x| **x < 0.0).sum();
            let hi: f64 = n[..d].iter().filter(|x| **x > 0.0).sum();
            (n, f.offset, lo, hi)
        })
        .collect();
    let mut total = 0.0;
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    'cells: for c in s.cells() {
        planes.clear();
        for (n, b, lo, hi) in &local {
            let v = n[0] * c[0] as f64 + n[1] * c[1] as f64 + n[2] * c[2] as f64;
            if v + hi <= *b {
                continue;
            }
            if v + lo >= *b {
                continue 'cells;
            }
            planes.push((n[..d].to_vec(), b - v));
        }
        total += if planes.is_empty() { 1.0 } else { clip_cube_volume(d, &planes) };
    }
    total * h.powi(d as i32)
}

/// Number of cells `β ∈ b` with `β + k ∈ a`.
pub fn shifted_overlap_count(a: &CellSet, b: &CellSet, k: &[i64; 3]) -> usize {
    b.cells().iter().filter(|c| a.contains(&[c[0] + k[0], c[1] + k[1], c[2] + k[2]])).count()
}

/// Exact `|a ∩ (b + shift)|`. Writing `shift = h(k + f)` with `k` integer and
/// `f ∈ [0,1)^d`, the overlap of two cells is a product of per-axis lengths
/// `1-f_i` or `f_i`, so the total is a weighted sum of `2^d` lattice counts.
pub fn overlap_volume(a: &CellSet, b: &CellSet, shift: &[Rational]) -> Result<Rational> {
    a.grid().check_same(b.grid())?;
    let d = a.dim();
    if shift.len() != d {
        return Err(Error::Invalid(format!("shift has {} components, expected {d}", shift.len())));
    }
    let mut k = [0i64; 3];
    let mut f = vec![Rational::zero(); d];
    for i in 0..d {
        let u = &shift[i] / a.pitch();
        let fl = u.floor();
        k[i] = fl.to_integer().to_i64().ok_or_else(|| Error::Invalid("shift too large".into()))?;
        f[i] = u - fl;
    }
    let mut total = Rational::zero();
    for mask in 0..(1usize << d) {
        let mut w = Rational::one();
        let mut kk = k;
        for i in 0..d {
            if mask >> i & 1 == 1 {
                w *= &f[i];
                kk[i] += 1;
            } else {
                w *= Rational::one() - &f[i];
            }
        }
        if w.is_zero() {
            continue;
        }
        total += w * Rational::from_integer(BigInt::from(shifted_overlap_count(a, b, &kk)));
    }
    Ok(total * pow(a.pitch(), d))
}

/// Exact `|a △ (b + shift)| = |a| + |b| - 2|a ∩ (b + shift)|`.
pub fn symdiff_volume(a: &CellSet, b: &CellSet, shift: &[Rational]) -> Result<Rational> {
    let ov = overlap_volume(a, b, shift)?;
    Ok(a.volume() + b.volume() - ov * Rational::from_integer(BigInt::from(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::cell::GridSpec;
    use crate::geom::polytope::{convex_hull, Simplex};
    use crate::rational::{int, ipoint, rat};

    fn tri() -> Polytope {
        Simplex::new(vec![ipoint(&[0, 0]), ipoint(&[1, 0]), ipoint(&[0, 1])]).unwrap().to_polytope()
    }

    #[test]
    fn unit_cell_against_triangle() {
        let s = CellSet::new(GridSpec::unit(2), [[0, 0, 0]]);
        assert_eq!(region_measure(&s, &tri()).unwrap(), rat(1, 2));
    }

    #[test]
    fn containing_and_disjoint_regions() {
        let s = CellSet::new(GridSpec::new(2, rat(1, 3)).unwrap(), [[0, 0, 0], [1, 2, 0], [4, 1, 0]]);
        let big = Polytope::from_box(&[int(-1), int(-1)], &[int(5), int(5)]).unwrap();
        assert_eq!(region_measure(&s, &big).unwrap(), s.volume());
        let far = Polytope::from_box(&[int(10), int(10)], &[int(11), int(11)]).unwrap();
        assert_eq!(region_measure(&s, &far).unwrap(), int(0));
    }

    #[test]
    fn hull_contains_set() {
        let s = CellSet::new(GridSpec::new(3, rat(1, 2)).unwrap(), [[0, 0, 0], [3, 1, 0], [1, 2, 2], [0, 3, 1]]);
        let h = convex_hull(&s).unwrap();
        assert_eq!(region_measure(&s, &h).unwrap(), s.volume());
    }

    #[test]
    fn cube_clipper_3d() {
        // x + y + z <= 1 inside the unit cube is the corner tetrahedron.
        let planes = vec![(vec![int(1), int(1), int(1)], int(1))];
        assert_eq!(clip_cube_volume(3, &planes), rat(1, 6));
        let planes = vec![(vec![int(1), int(0), int(0)], rat(1, 2)), (vec![int(0), int(-1), int(0)], rat(-1, 4))];
        assert_eq!(clip_cube_volume(3, &planes), rat(3, 8));
        let f: f64 = clip_cube_volume(3, &[(vec![1.0, 1.0, 1.0], 1.5)]);
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn float_path_agrees() {
        let s = CellSet::block(GridSpec::new(2, rat(1, 4)).unwrap(), &[0, 0], &[4, 4]);
        let t = tri();
        let exact = to_f64(&region_measure(&s, &t).unwrap());
        let hs: Vec<HalfSpaceF64> = t.facets().iter().map(HalfSpaceF64::from_exact).collect();
        assert!((measure_in_halfspaces_f64(&s, &hs) - exact).abs() < 1e-12);
    }

    #[test]
    fn symdiff_examples() {
        let g = GridSpec::unit(2);
        let a = CellSet::new(g.clone(), [[0, 0, 0]]);
        assert_eq!(symdiff_volume(&a, &a, &[int(0), int(0)]).unwrap(), int(0));
        assert_eq!(symdiff_volume(&a, &a, &[rat(1, 2), int(0)]).unwrap(), int(1));
        let g1 = GridSpec::unit(1);
        let a = CellSet::new(g1.clone(), [[0, 0, 0]]);
        let b = CellSet::new(g1, [[2, 0, 0]]);
        assert_eq!(symdiff_volume(&a, &b, &[int(-2)]).unwrap(), int(0));
        assert_eq!(symdiff_volume(&a, &b, &[rat(-5, 2)]).unwrap(), int(1));
    }
}
