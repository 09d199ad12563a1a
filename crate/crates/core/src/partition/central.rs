//! Simplex subdivision at an interior point, and the search for a central
//! point of a dense set that keeps every child simplex large.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::geom::cell::CellSet;
use crate::geom::measure::region_measure;
use crate::geom::polytope::Simplex;
use crate::rational::{dist_sq, int, Point, Rational};

/// Child `i` replaces vertex `i` by `x`, so its volume is `λ_i |S|` for the
/// barycentric coordinate `λ_i` of `x`.
pub fn subdivide_simplex(s: &Simplex, x: &[Rational]) -> Result<Vec<Simplex>> {
    if x.len() != s.dim() {
        return Err(Error::Invalid("point dimension differs from simplex".into()));
    }
    if !s.strictly_contains(x) {
        return Err(Error::Degenerate("subdivision point must be strictly inside the simplex".into()));
    }
    (0..s.vertices().len())
        .map(|i| {
            let mut vs = s.vertices().to_vec();
            vs[i] = x.to_vec();
            Simplex::new(vs)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralPoint {
    pub x: Point,
    /// Child volume over parent volume, per child.
    pub ratios: Vec<Rational>,
    /// The shrink factor of the copy `x` was found in.
    pub shrink: Rational,
}

impl CentralPoint {
    /// Every child keeps at least `1/(n+2)` of the volume.
    pub fn ratios_ok(&self, dim: usize) -> bool {
        let floor = Rational::new(BigInt::one(), BigInt::from(dim as i64 + 2));
        self.ratios.iter().all(|r| *r >= floor)
    }

    /// `d(x, x_i) <= (n+1)/(n+2) · max edge`, compared in squares.
    pub fn contraction_ok(&self, s: &Simplex) -> bool {
        let n = s.dim() as i64;
        let f = Rational::new(BigInt::from(n + 1), BigInt::from(n + 2));
        let bound = &f * &f * s.max_edge_sq();
        s.vertices().iter().all(|v| dist_sq(&self.x, v) <= bound)
    }
}

/// Number of shrink levels tried, `ε_k = k / (levels·(n+2))`.
const LEVELS: i64 = 8;

/// Finds a point of `a` near the barycenter of `s` whose subdivision is balanced.
///
/// Requires `|s| <= (1 + alpha)|a ∩ s|`. Cells of `a` are scanned in
/// lexicographic order inside the copies `b + ε(S - b)` for growing `ε` up to
/// `1/(n+2)`; the first cell center that passes both exact checks wins.
pub fn central_point(a: &CellSet, s: &Simplex, alpha: &Rational) -> Result<CentralPoint> {
    let n = s.dim();
    if a.dim() != n {
        return Err(Error::GridMismatch("cell set and simplex dimensions differ".into()));
    }
    let vol = s.volume();
    let inside = region_measure(a, &s.to_polytope())?;
    if vol > (Rational::one() + alpha) * &inside {
        return Err(Error::Precondition(format!("|S| = {vol} exceeds (1 + {alpha})·|A ∩ S| = {}", (Rational::one() + alpha) * &inside)));
    }
    let bary = s.barycenter();
    let h = a.pitch();
    for k in 1..=LEVELS {
        let eps = Rational::new(BigInt::from(k), BigInt::from(LEVELS * (n as i64 + 2)));
        let shrunk: Vec<Point> = s
            .vertices()
            .iter()
            .map(|v| v.iter().zip(&bary).map(|(vi, bi)| bi + (vi - bi) * &eps).collect())
            .collect();
        let shrunk = Simplex::new(shrunk)?;
        // Integer bounding box of cells whose center can lie in the copy.
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for axis in 0..n {
            let coords = shrunk.vertices().iter().map(|v| &v[axis] / h);
            let min = coords.clone().min().expect("vertices");
            let max = coords.max().expect("vertices");
            lo[axis] = (min - Rational::new(BigInt::one(), BigInt::from(2))).floor().to_integer().try_into().unwrap_or(i64::MIN);
            hi[axis] = max.ceil().to_integer().try_into().unwrap_or(i64::MAX);
        }
        for c in a.cells() {
            if (0..n).any(|k| c[k] < lo[k] || c[k] > hi[k]) {
                continue;
            }
            let x = a.center(c);
            let lam = shrunk.barycentric(&x);
            if lam.iter().any(|l| l.is_negative()) {
                continue;
            }
            let ratios: Vec<Rational> = s.barycentric(&x).into_iter().map(|l| l.abs()).collect();
            let cand = CentralPoint { x, ratios, shrink: eps.clone() };
            if cand.ratios_ok(n) && cand.contraction_ok(s) {
                return Ok(cand);
            }
        }
    }
    Err(Error::NoQualifyingPoint(format!("no cell center of A in the {}-shrunk simplex (alpha = {alpha})", int(1) / int(n as i64 + 2))))
}
