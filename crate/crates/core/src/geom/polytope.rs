use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::cell::CellSet;
use crate::geom::hull::{drop_axis, hull, hull_2d, project, HullScalar};
use crate::rational::{dist_sq, dot, factorial, primitive_integer, sub, Point, Rational};

/// `normal · x <= offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfSpace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl HalfSpace {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Result<Self> {
        if normal.iter().all(|x| x.is_zero()) {
            return Err(Error::Invalid("half-space normal is zero".into()));
        }
        Ok(HalfSpace { normal, offset })
    }

    /// Rescales so the normal is a primitive integer vector.
    pub fn normalized(&self) -> HalfSpace {
        let (ints, f) = primitive_integer(&self.normal);
        HalfSpace { normal: ints.into_iter().map(Rational::from_integer).collect(), offset: &self.offset * f }
    }

    /// `normal · p - offset`; nonpositive inside.
    pub fn eval(&self, p: &[Rational]) -> Rational {
        dot(&self.normal, p) - &self.offset
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        !self.eval(p).is_positive()
    }

    /// The half-space moved by `-v`: `x` is inside iff `x + v` was.
    pub fn translated_back(&self, v: &[Rational]) -> HalfSpace {
        HalfSpace { normal: self.normal.clone(), offset: &self.offset - dot(&self.normal, v) }
    }

    /// The closed complement `normal · x >= offset`.
    pub fn flipped(&self) -> HalfSpace {
        HalfSpace { normal: self.normal.iter().map(|x| -x).collect(), offset: -&self.offset }
    }
}

/// A convex polytope given by its extreme points, with facet half-spaces when
/// it is full-dimensional. Lower-dimensional polytopes are flagged through
/// `affine_dim` and have volume zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<HalfSpace>,
    affine_dim: Option<usize>,
}

impl Polytope {
    pub fn empty(dim: usize) -> Self {
        Polytope { dim, vertices: Vec::new(), facets: Vec::new(), affine_dim: None }
    }

    /// Convex hull of arbitrary rational points.
    pub fn hull_of(dim: usize, points: &[Point]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension { dim });
        }
        if points.is_empty() {
            return Ok(Self::empty(dim));
        }
        let h = hull(dim, points);
        Ok(Self::assemble(dim, points, h.vertices, h.facets, h.affine_dim, &Rational::one()))
    }

    fn assemble<T: HullScalar>(
        dim: usize,
        points: &[Vec<T>],
        vidx: Vec<usize>,
        facets: Vec<(Vec<T>, T)>,
        affine_dim: usize,
        scale: &Rational,
    ) -> Self {
        let vertices = vidx.iter().map(|&i| points[i].iter().map(|x| x.to_rational() * scale).collect()).collect();
        let mut facets: Vec<HalfSpace> = facets
            .into_iter()
            .map(|(n, c)| {
                let h = HalfSpace { normal: n.iter().map(|x| x.to_rational()).collect(), offset: c.to_rational() * scale };
                h.normalized()
            })
            .collect();
        facets.sort_by(|a, b| a.normal.cmp(&b.normal).then(a.offset.cmp(&b.offset)));
        Polytope { dim, vertices, facets, affine_dim: Some(affine_dim) }
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn from_box(lo: &[Rational], hi: &[Rational]) -> Result<Self> {
        let d = lo.len();
        let mut pts = Vec::new();
        for mask in 0..(1usize << d) {
            pts.push((0..d).map(|k| if mask >> k & 1 == 1 { hi[k].clone() } else { lo[k].clone() }).collect());
        }
        Self::hull_of(d, &pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[HalfSpace] {
        &self.facets
    }

    pub fn affine_dim(&self) -> Option<usize> {
        self.affine_dim
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.affine_dim.is_none_or(|k| k < self.dim)
    }

    /// Closed containment; only meaningful for full-dimensional polytopes.
    pub fn contains(&self, p: &[Rational]) -> bool {
        !self.is_degenerate() && self.facets.iter().all(|h| h.contains(p))
    }

    pub fn volume(&self) -> Rational {
        polytope_volume(self)
    }

    pub fn clip(&self, h: &HalfSpace) -> Polytope {
        clip_polytope(self, h)
    }

    /// Vertices of a facet of a 3D polytope, in cyclic order.
    fn facet_cycle(&self, f: &HalfSpace) -> Vec<Point> {
        let on: Vec<Point> = self.vertices.iter().filter(|v| f.eval(v).is_zero()).cloned().collect();
        let drop = drop_axis(&f.normal);
        let proj: Vec<Vec<Rational>> = on.iter().map(|p| project(p, drop)).collect();
        hull_2d(&proj).into_iter().map(|i| on[i].clone()).collect()
    }

    /// Triangulates into simplices sharing the first vertex.
    pub fn fan_triangulation(&self) -> Vec<Simplex> {
        if self.is_degenerate() {
            return Vec::new();
        }
        let v0 = &self.vertices[0];
        let mut out = Vec::new();
        match self.dim {
            1 => out.push(Simplex { vertices: self.vertices.clone() }),
            2 => {
                for i in 1..self.vertices.len() - 1 {
                    out.push(Simplex {
                        vertices: vec![v0.clone(), self.vertices[i].clone(), self.vertices[i + 1].clone()],
                    });
                }
            }
            _ => {
                for f in &self.facets {
                    if f.eval(v0).is_zero() {
                        continue;
                    }
                    let cyc = self.facet_cycle(f);
                    for i in 1..cyc.len() - 1 {
                        out.push(Simplex {
                            vertices: vec![v0.clone(), cyc[0].clone(), cyc[i].clone(), cyc[i + 1].clone()],
                        });
                    }
                }
            }
        }
        out
    }
}

fn det(rows: &[Point]) -> Rational {
    match rows.len() {
        1 => rows[0][0].clone(),
        2 => &rows[0][0] * &rows[1][1] - &rows[0][1] * &rows[1][0],
        3 => {
            let r = rows;
            &r[0][0] * (&r[1][1] * &r[2][2] - &r[1][2] * &r[2][1]) - &r[0][1] * (&r[1][0] * &r[2][2] - &r[1][2] * &r[2][0])
                + &r[0][2] * (&r[1][0] * &r[2][1] - &r[1][1] * &r[2][0])
        }
        _ => unreachable!("dimensions above 3 are rejected earlier"),
    }
}

/// Signed `det(v1-v0, ..., vd-v0)`.
pub fn simplex_det(vs: &[Point]) -> Rational {
    let rows: Vec<Point> = vs[1..].iter().map(|v| sub(v, &vs[0])).collect();
    det(&rows)
}

/// Exact volume by fan triangulation; zero for degenerate polytopes.
pub fn polytope_volume(p: &Polytope) -> Rational {
    if p.is_degenerate() {
        return Rational::zero();
    }
    let v = &p.vertices;
    match p.dim {
        1 => &v[1][0] - &v[0][0],
        2 => {
            let mut twice = Rational::zero();
            for i in 0..v.len() {
                let (a, b) = (&v[i], &v[(i + 1) % v.len()]);
                twice += &a[0] * &b[1] - &a[1] * &b[0];
            }
            twice / Rational::from_integer(BigInt::from(2))
        }
        _ => p.fan_triangulation().iter().map(|s| s.volume()).sum(),
    }
}

/// `p ∩ {normal·x <= offset}`, possibly empty or degenerate.
pub fn clip_polytope(p: &Polytope, h: &HalfSpace) -> Polytope {
    if p.is_empty() {
        return p.clone();
    }
    let vals: Vec<Rational> = p.vertices.iter().map(|v| h.eval(v)).collect();
    if vals.iter().all(|x| !x.is_positive()) {
        return p.clone();
    }
    let mut pts: Vec<Point> = p.vertices.iter().zip(&vals).filter(|(_, x)| !x.is_positive()).map(|(v, _)| v.clone()).collect();
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            if vals[i].is_negative() && vals[j].is_positive() || vals[i].is_positive() && vals[j].is_negative() {
                // Point where the segment crosses the plane.
                let s = &vals[i] / (&vals[i] - &vals[j]);
                let q: Point = p.vertices[i].iter().zip(&p.vertices[j]).map(|(a, b)| a + (b - a) * &s).collect();
                pts.push(q);
            }
        }
    }
    Polytope::hull_of(p.dim, &pts).expect("dimension already validated")
}

/// Largest squared distance between two vertices.
pub fn diameter_sq(p: &Polytope) -> Result<Rational> {
    if p.is_empty() {
        return Err(Error::Empty("polytope"));
    }
    let mut best = Rational::zero();
    for i in 0..p.vertices.len() {
        for j in i + 1..p.vertices.len() {
            let d = dist_sq(&p.vertices[i], &p.vertices[j]);
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Hull of all cell corners. Only the two extreme corners of each line along the
/// last axis can be extreme; in 3D each level of the first axis is further
/// reduced to its planar hull.
pub fn convex_hull(s: &CellSet) -> Result<Polytope> {
    if s.is_empty() {
        return Err(Error::Empty("cell set"));
    }
    let d = s.dim();
    let mut pts: Vec<Vec<i128>> = Vec::new();
    for line in s.lines() {
        let lo = line.runs.first().expect("nonempty line").lo as i128;
        let hi = line.runs.last().expect("nonempty line").hi as i128;
        let (k0, k1) = (line.key[0] as i128, line.key[1] as i128);
        match d {
            1 => {
                pts.push(vec![lo]);
                pts.push(vec![hi]);
            }
            2 => {
                for e in 0..2 {
                    pts.push(vec![k0 + e, lo]);
                    pts.push(vec![k0 + e, hi]);
                }
            }
            _ => {
                for e0 in 0..2 {
                    for e1 in 0..2 {
                        pts.push(vec![k0 + e0, k1 + e1, lo]);
                        pts.push(vec![k0 + e0, k1 + e1, hi]);
                    }
                }
            }
        }
    }
    pts.sort_unstable();
    pts.dedup();
    if d == 3 {
        let mut levels: BTreeMap<i128, Vec<Vec<i128>>> = BTreeMap::new();
        for p in pts {
            levels.entry(p[0]).or_default().push(p);
        }
        pts = Vec::new();
        for (_, level) in levels {
            let proj: Vec<Vec<i128>> = level.iter().map(|p| vec![p[1], p[2]]).collect();
            pts.extend(hull_2d(&proj).into_iter().map(|i| level[i].clone()));
        }
    }
    let h = hull(d, &pts);
    let facets = h
        .facets
        .into_iter()
        .map(|(n, c)| {
            let g = n.iter().fold(0i128, |g, &x| g.gcd(&x));
            (n.iter().map(|x| x / g).collect(), c / g)
        })
        .collect();
    Ok(Polytope::assemble(d, &pts, h.vertices, facets, h.affine_dim, s.pitch()))
}

/// A nondegenerate simplex with `dim + 1` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    vertices: Vec<Point>,
}

impl Simplex {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let d = vertices.first().map_or(0, |v| v.len());
        if !(1..=3).contains(&d) {
            return Err(Error::UnsupportedDimension { dim: d });
        }
        if vertices.len() != d + 1 || vertices.iter().any(|v| v.len() != d) {
            return Err(Error::Invalid(format!("a {d}-simplex needs {} vertices of length {d}", d + 1)));
        }
        if simplex_det(&vertices).is_zero() {
            return Err(Error::Degenerate("simplex vertices are affinely dependent".into()));
        }
        Ok(Simplex { vertices })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn volume(&self) -> Rational {
        simplex_det(&self.vertices).abs() / factorial(self.dim())
    }

    pub fn barycenter(&self) -> Point {
        let n = Rational::from_integer(BigInt::from(self.vertices.len()));
        (0..self.dim()).map(|k| self.vertices.iter().map(|v| &v[k]).sum::<Rational>() / &n).collect()
    }

    /// Barycentric coordinates of `x`; they sum to one.
    pub fn barycentric(&self, x: &[Rational]) -> Vec<Rational> {
        let total = simplex_det(&self.vertices);
        (0..self.vertices.len())
            .map(|i| {
                let mut vs = self.vertices.clone();
                vs[i] = x.to_vec();
                simplex_det(&vs) / &total
            })
            .collect()
    }

    pub fn strictly_contains(&self, x: &[Rational]) -> bool {
        self.barycentric(x).iter().all(|l| l.is_positive())
    }

    pub fn to_polytope(&self) -> Polytope {
        Polytope::hull_of(self.dim(), &self.vertices).expect("simplex dimension is 1..=3")
    }

    /// Largest squared edge length.
    pub fn max_edge_sq(&self) -> Rational {
        let mut best = Rational::zero();
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                best = best.max(dist_sq(&self.vertices[i], &self.vertices[j]));
            }
        }
        best
    }
}
