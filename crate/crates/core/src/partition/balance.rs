//! Measure balancing: translating `B` so it matches `A` in every cone of a
//! frame, and rotating a hyperplane through a codimension-2 anchor until it
//! splits `A` and `B` evenly.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::cell::CellSet;
use crate::geom::cone::ConeFrame;
use crate::geom::measure::{measure_in_halfspaces, measure_in_halfspaces_f64, HalfSpaceF64};
use crate::geom::polytope::HalfSpace;
use crate::rational::{dyadic, int, to_f64, Point, Rational};

/// What a balancing search found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Translation `v` applied to `B`.
    Translation(Point),
    /// Pencil parameter `s` and the resulting half-space `H⁺`.
    Hyperplane { s: Rational, halfspace: HalfSpace },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceResult {
    pub witness: Witness,
    /// Largest exact measure imbalance at the witness.
    pub residual: Rational,
    pub iterations: usize,
}

/// Exact `|s ∩ C_i|` for every cone of the frame; they sum to `|s|`.
pub fn cone_measures(s: &CellSet, frame: &ConeFrame) -> Result<Vec<Rational>> {
    if s.dim() != frame.dim() {
        return Err(Error::GridMismatch("cell set and cone frame dimensions differ".into()));
    }
    Ok(frame.cones().iter().map(|hs| measure_in_halfspaces(s, hs)).collect())
}

/// Cone half-spaces moved by `-v`, so measuring `B` in them gives `|(B+v) ∩ C|`.
fn shifted_back(hs: &[HalfSpace], v: &[Rational]) -> Vec<HalfSpace> {
    hs.iter().map(|h| h.translated_back(v)).collect()
}

fn shifted_back_f64(hs: &[HalfSpaceF64], v: &[f64]) -> Vec<HalfSpaceF64> {
    hs.iter()
        .map(|h| {
            let nv: f64 = (0..v.len()).map(|k| h.normal[k] * v[k]).sum();
            HalfSpaceF64 { normal: h.normal, offset: h.offset - nv }
        })
        .collect()
}

/// Exact `max_i ||A ∩ C_i| - |(B+v) ∩ C_i||`.
pub fn kkm_residual(targets: &[Rational], b: &CellSet, frame: &ConeFrame, v: &[Rational]) -> Rational {
    frame
        .cones()
        .iter()
        .zip(targets)
        .map(|(hs, m)| (m - measure_in_halfspaces(b, &shifted_back(hs, v))).abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Settings for [`kkm_cone_translate`].
#[derive(Debug, Clone)]
pub struct KkmOptions {
    pub max_iterations: usize,
    /// Bits of the dyadic grid (in units of the pitch) the float witness is rounded to.
    pub dyadic_bits: u32,
}

impl Default for KkmOptions {
    fn default() -> Self {
        KkmOptions { max_iterations: 400, dyadic_bits: 30 }
    }
}

fn centroid(s: &CellSet) -> Vec<f64> {
    let h = to_f64(s.pitch());
    let n = s.len().max(1) as f64;
    (0..s.dim()).map(|k| s.cells().iter().map(|c| (c[k] as f64 + 0.5) * h).sum::<f64>() / n).collect()
}

/// Solves the small dense system `m x = r` by Gaussian elimination.
fn solve(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (r[i] - s) / m[i][i];
    }
    Some(x)
}

/// Translation `v` with `|A ∩ C_i| = |(B+v) ∩ C_i|` for every cone, up to `tol·|A|`.
///
/// One dimension is solved exactly. Otherwise a damped Gauss-Newton iteration on
/// the cone imbalances (finite-difference Jacobian, compass-search fallback,
/// several starts around the centroid difference) runs in floating point; each
/// candidate is rounded to a dyadic grid and certified with exact measures.
pub fn kkm_cone_translate(a: &CellSet, b: &CellSet, frame: &ConeFrame, tol: &Rational, opts: &KkmOptions) -> Result<BalanceResult> {
    a.grid().check_same(b.grid())?;
    if a.volume() != b.volume() {
        return Err(Error::UnequalVolumes { a: a.volume().to_string(), b: b.volume().to_string() });
    }
    if !tol.is_positive() {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let targets = cone_measures(a, frame)?;
    let limit = tol * a.volume();
    let d = a.dim();

    let zero: Point = vec![Rational::zero(); d];
    let r0 = kkm_residual(&targets, b, frame, &zero);
    // In one dimension the solution set is an interval; the exact solver
    // returns its left end unless the sets already coincide.
    if r0.is_zero() && (d > 1 || a == b) {
        return Ok(BalanceResult { witness: Witness::Translation(zero), residual: r0, iterations: 0 });
    }
    if d == 1 {
        return kkm_1d(&targets, b, frame);
    }

    let h = to_f64(a.pitch());
    let cones_f: Vec<Vec<HalfSpaceF64>> = frame.cones().iter().map(|hs| hs.iter().map(HalfSpaceF64::from_exact).collect()).collect();
    let targets_f: Vec<f64> = targets.iter().map(to_f64).collect();
    let eval = |v: &[f64]| -> Vec<f64> {
        cones_f.iter().zip(&targets_f).map(|(hs, m)| m - measure_in_halfspaces_f64(b, &shifted_back_f64(hs, v))).collect()
    };
    let norm = |g: &[f64]| g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let limit_f = to_f64(&limit);

    let (ca, cb) = (centroid(a), centroid(b));
    let base: Vec<f64> = (0..d).map(|k| ca[k] - cb[k]).collect();
    let spread = {
        let (lo, hi) = b.bounds().expect("nonempty");
        (0..d).map(|k| (hi[k] - lo[k] + 1) as f64 * h).fold(0.0, f64::max) / 4.0
    };
    let mut starts = vec![base.clone()];
    for k in 0..d {
        for sgn in [-1.0, 1.0] {
            let mut s = base.clone();
            s[k] += sgn * spread;
            starts.push(s);
        }
    }

    let per_start = (opts.max_iterations / starts.len()).max(20);
    let mut iterations = 0usize;
    let mut best: Option<(Rational, Point)> = None;
    for start in starts {
        let mut v = start;
        let mut g = eval(&v);
        let mut step = spread.max(h);
        for _ in 0..per_start {
            iterations += 1;
            if norm(&g) <= limit_f * 0.25 {
                break;
            }
            // Finite-difference Jacobian of the first d imbalances.
            let fd = h * 1e-3;
            let mut jac = vec![vec![0.0; d]; d + 1];
            for k in 0..d {
                let mut vp = v.clone();
                let mut vm = v.clone();
                vp[k] += fd;
                vm[k] -= fd;
                let (gp, gm) = (eval(&vp), eval(&vm));
                for i in 0..=d {
                    jac[i][k] = (gp[i] - gm[i]) / (2.0 * fd);
                }
            }
            // Normal equations of the least-squares step.
            let jtj: Vec<Vec<f64>> = (0..d).map(|p| (0..d).map(|q| (0..=d).map(|i| jac[i][p] * jac[i][q]).sum()).collect()).collect();
            let jtg: Vec<f64> = (0..d).map(|p| -(0..=d).map(|i| jac[i][p] * g[i]).sum::<f64>()).collect();
            let mut accepted = false;
            if let Some(dx) = solve(jtj, jtg) {
                let mut lambda = 1.0;
                for _ in 0..30 {
                    let cand: Vec<f64> = (0..d).map(|k| v[k] + lambda * dx[k]).collect();
                    let gc = eval(&cand);
                    if norm(&gc) < norm(&g) {
                        v = cand;
                        g = gc;
                        accepted = true;
                        break;
                    }
                    lambda *= 0.5;
                }
            }
            if !accepted {
                // Compass search.
                let mut moved = false;
                while !moved && step > h * 1e-12 {
                    for k in 0..d {
                        for sgn in [-1.0, 1.0] {
                            let mut cand = v.clone();
                            cand[k] += sgn * step;
                            let gc = eval(&cand);
                            if norm(&gc) < norm(&g) {
                                v = cand;
                                g = gc;
                                moved = true;
                            }
                        }
                    }
                    if !moved {
                        step *= 0.5;
                    }
                }
                if !moved {
                    break;
                }
            }
        }
        let exact: Point = v.iter().map(|x| dyadic(x / h, opts.dyadic_bits) * a.pitch()).collect();
        let res = kkm_residual(&targets, b, frame, &exact);
        if res <= limit {
            return Ok(BalanceResult { witness: Witness::Translation(exact), residual: res, iterations });
        }
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, exact));
        }
    }
    let residual = best.map(|(r, _)| r).unwrap_or(r0);
    Err(Error::IterationCap { cap: opts.max_iterations, residual: residual.to_string() })
}

/// Exact one-dimensional solve. With cone 0 the ray `[x, ∞)`, the measure
/// `|(B+v) ∩ [x,∞)|` is nondecreasing and linear between the shifts that put a
/// cell boundary of `B` on the apex; the matching shift is found by bisection
/// over those breakpoints and linear interpolation.
fn kkm_1d(targets: &[Rational], b: &CellSet, frame: &ConeFrame) -> Result<BalanceResult> {
    let h = b.pitch();
    let x = &frame.apex()[0];
    // The cone containing points right of the apex.
    let right = frame.locate(&[x + Rational::one()]);
    let m = &targets[right];
    let cells = b.cells();
    // mass(j) = |B ∩ [h·j, ∞)|, attained at v_j = x - h·j.
    let mass = |j: i64| -> Rational {
        let idx = cells.partition_point(|c| c[0] < j);
        int((cells.len() - idx) as i64) * b.grid().cell_volume()
    };
    let (lo, hi) = b.bounds().expect("nonempty");
    // Largest j with mass(j) >= m; mass(lo) = |B| >= m and mass(hi+1) = 0.
    let (mut good, mut bad) = (lo[0], hi[0] + 1);
    let mut iterations = 0;
    if mass(bad) >= *m {
        good = bad;
    } else {
        while bad - good > 1 {
            iterations += 1;
            let mid = good + (bad - good) / 2;
            if mass(mid) >= *m {
                good = mid;
            } else {
                bad = mid;
            }
        }
    }
    let (f_hi, f_lo) = (mass(good), mass(good + 1));
    let v_lo = x - h * int(good + 1);
    let v = if f_hi == f_lo { v_lo } else { v_lo + (m - &f_lo) / (f_hi - f_lo) * h };
    let v = vec![v];
    let residual = kkm_residual(targets, b, frame, &v);
    Ok(BalanceResult { witness: Witness::Translation(v), residual, iterations })
}

/// Codimension-2 anchor for a hyperplane pencil: a point in 2D, a line in 3D.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchor {
    pub point: Point,
    /// Line direction (3D only).
    pub direction: Option<Point>,
}

impl Anchor {
    pub fn point(p: Point) -> Self {
        Anchor { point: p, direction: None }
    }

    pub fn line(p: Point, direction: Point) -> Self {
        Anchor { point: p, direction: Some(direction) }
    }

    /// Two rational vectors spanning the plane the pencil normals live in.
    fn basis(&self) -> Result<(Point, Point)> {
        match self.point.len() {
            2 => Ok((vec![int(1), int(0)], vec![int(0), int(1)])),
            3 => {
                let u = self.direction.as_ref().ok_or_else(|| Error::Invalid("3D anchor needs a direction".into()))?;
                let cross = |a: &[Rational], b: &[Rational]| -> Point {
                    vec![&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]]
                };
                let axis = (0..3).min_by_key(|&k| u[k].abs()).expect("three axes");
                let mut ek = vec![int(0); 3];
                ek[axis] = int(1);
                let e1 = cross(u, &ek);
                if e1.iter().all(|x| x.is_zero()) {
                    return Err(Error::Degenerate("anchor direction is zero".into()));
                }
                let e2 = cross(u, &e1);
                Ok((e1, e2))
            }
            d => Err(Error::UnsupportedDimension { dim: d }),
        }
    }
}

/// `H⁺(s) = {x : n(s)·(x - p) <= 0}` with `n(s) = (1-2s) e1 + 2s(1-s) e2`.
/// The normal turns from `e1` through `e2` to `-e1` as `s` runs over `[0,1]`.
pub fn pencil_halfspace(anchor: &Anchor, s: &Rational) -> Result<HalfSpace> {
    let (e1, e2) = anchor.basis()?;
    let two = int(2);
    let c1 = Rational::one() - &two * s;
    let c2 = &two * s * (Rational::one() - s);
    let n: Point = e1.iter().zip(&e2).map(|(x, y)| x * &c1 + y * &c2).collect();
    let off = crate::rational::dot(&n, &anchor.point);
    Ok(HalfSpace::new(n, off)?.normalized())
}

/// Settings for [`balanced_hyperplane`].
#[derive(Debug, Clone)]
pub struct BisectOptions {
    /// Float bisection steps before exact certification.
    pub float_steps: u32,
    /// Total cap on bisection steps, float and exact.
    pub max_iterations: usize,
}

impl Default for BisectOptions {
    fn default() -> Self {
        BisectOptions { float_steps: 26, max_iterations: 64 }
    }
}

/// Finds a hyperplane through the anchor splitting `A ∩ C` and `B ∩ C` into
/// halves of equal measure, up to `tol·|A ∩ C|`. `cone = None` means all of space.
pub fn balanced_hyperplane(
    a: &CellSet,
    b: &CellSet,
    cone: Option<&[HalfSpace]>,
    anchor: &Anchor,
    tol: &Rational,
    opts: &BisectOptions,
) -> Result<BalanceResult> {
    a.grid().check_same(b.grid())?;
    let d = a.dim();
    if !(2..=3).contains(&d) || anchor.point.len() != d {
        return Err(Error::Precondition("hyperplane balancing needs dim 2 or 3 and a matching anchor".into()));
    }
    let region: Vec<HalfSpace> = cone.map(|c| c.to_vec()).unwrap_or_default();
    let (ma, mb) = (measure_in_halfspaces(a, &region), measure_in_halfspaces(b, &region));
    if ma != mb {
        return Err(Error::Precondition(format!("|A ∩ C| = {ma} differs from |B ∩ C| = {mb}")));
    }
    let limit = tol * &ma;
    let exact_f = |s: &Rational| -> Result<(Rational, HalfSpace)> {
        let hp = pencil_halfspace(anchor, s)?;
        let mut hs = region.clone();
        hs.push(hp.clone());
        Ok((measure_in_halfspaces(a, &hs) - measure_in_halfspaces(b, &hs), hp))
    };
    let (f0, h0) = exact_f(&Rational::zero())?;
    if f0.is_zero() {
        return Ok(BalanceResult { witness: Witness::Hyperplane { s: Rational::zero(), halfspace: h0 }, residual: f0, iterations: 0 });
    }
    let sign0 = f0.is_positive();
    let region_f: Vec<HalfSpaceF64> = region.iter().map(HalfSpaceF64::from_exact).collect();
    let float_f = |s: &Rational| -> Result<f64> {
        let hp = HalfSpaceF64::from_exact(&pencil_halfspace(anchor, s)?);
        let mut hs = region_f.clone();
        hs.push(hp);
        Ok(measure_in_halfspaces_f64(a, &hs) - measure_in_halfspaces_f64(b, &hs))
    };

    // Bracket [lo, hi] with f(lo) on the side of f(0) and f(hi) on the side of f(1) = -f(0).
    let (mut lo, mut hi) = (Rational::zero(), Rational::one());
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut iterations = 0usize;
    for _ in 0..opts.float_steps {
        iterations += 1;
        let mid = (&lo + &hi) * &half;
        let fm = float_f(&mid)?;
        if fm == 0.0 {
            lo = mid.clone();
            hi = mid;
            break;
        }
        if (fm > 0.0) == sign0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut best: Option<(Rational, Rational, HalfSpace)> = None;
    loop {
        for s in [&lo, &hi] {
            let (f, hp) = exact_f(s)?;
            let r = f.abs();
            if best.as_ref().is_none_or(|(br, _, _)| r < *br) {
                best = Some((r, s.clone(), hp));
            }
        }
        let (r, s, hp) = best.clone().expect("evaluated above");
        if r <= limit {
            return Ok(BalanceResult { witness: Witness::Hyperplane { s, halfspace: hp }, residual: r, iterations });
        }
        if iterations >= opts.max_iterations || lo == hi {
            return Err(Error::IterationCap { cap: opts.max_iterations, residual: r.to_string() });
        }
        // Exact bisection from here on.
        iterations += 1;
        let mid = (&lo + &hi) * &half;
        let (fm, _) = exact_f(&mid)?;
        if fm.is_zero() {
            lo = mid.clone();
            hi = mid;
        } else if fm.is_positive() == sign0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::cell::GridSpec;
    use crate::geom::polytope::Simplex;
    use crate::rational::{ipoint, point, rat};

    fn frame2() -> ConeFrame {
        let s = Simplex::new(vec![ipoint(&[0, 0]), ipoint(&[2, 0]), ipoint(&[0, 2])]).unwrap();
        ConeFrame::new(point(&[(1, 2), (1, 2)]), s).unwrap()
    }

    #[test]
    fn cone_measures_sum_to_volume() {
        let s = CellSet::block(GridSpec::new(2, rat(1, 4)).unwrap(), &[0, 0], &[4, 4]);
        let m = cone_measures(&s, &frame2()).unwrap();
        assert_eq!(m.iter().sum::<Rational>(), int(1));
    }

    #[test]
    fn one_cone_holds_everything() {
        let s = CellSet::block(GridSpec::new(2, rat(1, 4)).unwrap(), &[8, 8], &[10, 10]);
        let m = cone_measures(&s, &frame2()).unwrap();
        assert_eq!(m, vec![s.volume(), int(0), int(0)]);
    }

    #[test]
    fn kkm_identity_and_1d() {
        let s = CellSet::block(GridSpec::new(2, rat(1, 4)).unwrap(), &[0, 0], &[4, 4]);
        let r = kkm_cone_translate(&s, &s, &frame2(), &rat(1, 1_000_000), &KkmOptions::default()).unwrap();
        assert_eq!(r.witness, Witness::Translation(vec![int(0), int(0)]));
        assert_eq!(r.residual, int(0));

        let g = GridSpec::unit(1);
        let a = CellSet::block(g.clone(), &[0], &[2]);
        let b = CellSet::block(g, &[1], &[3]);
        let f = ConeFrame::new(ipoint(&[0]), Simplex::new(vec![ipoint(&[-1]), ipoint(&[1])]).unwrap()).unwrap();
        let r = kkm_cone_translate(&a, &b, &f, &rat(1, 1_000_000), &KkmOptions::default()).unwrap();
        assert_eq!(r.witness, Witness::Translation(vec![int(-1)]));
        assert_eq!(r.residual, int(0));
    }

    #[test]
    fn kkm_recovers_lattice_shift() {
        let g = GridSpec::new(2, rat(1, 8)).unwrap();
        let a = CellSet::block(g, &[0, 0], &[8, 6]).filter(|c| c[0] + c[1] < 11);
        let b = a.translate(&[3, 2]);
        let frame = ConeFrame::new(point(&[(1, 3), (1, 4)]), frame2().simplex().clone()).unwrap();
        let tol = rat(1, 1_000_000);
        let r = kkm_cone_translate(&a, &b, &frame, &tol, &KkmOptions::default()).unwrap();
        assert!(r.residual <= &tol * a.volume());
        let Witness::Translation(v) = r.witness else { panic!("expected a translation") };
        let target = [rat(-3, 8), rat(-2, 8)];
        for k in 0..2 {
            assert!((&v[k] - &target[k]).abs() < rat(1, 8), "v = {v:?}");
        }
    }

    #[test]
    fn hyperplane_symmetric_fixtures() {
        let g = GridSpec::new(2, rat(1, 2)).unwrap();
        let a = CellSet::block(g.clone(), &[-2, 0], &[2, 2]);
        let b = CellSet::block(g.clone(), &[-2, -2], &[2, 0]);
        let tol = rat(1, 1_000_000);
        let r = balanced_hyperplane(&a, &b, None, &Anchor::point(ipoint(&[0, 0])), &tol, &BisectOptions::default()).unwrap();
        assert_eq!(r.residual, int(0));
        let Witness::Hyperplane { s, halfspace } = r.witness else { panic!() };
        assert_eq!(s, int(0));
        assert_eq!(halfspace.normal, vec![int(1), int(0)]);

        // A bar left of the anchor and its mirror image on the right: the
        // horizontal line is the balancing one.
        let a = CellSet::new(g.clone(), [[-3, -1, 0], [-3, 0, 0]]);
        let b = a.map_cells(|c| [-c[0] - 1, c[1], 0]);
        let r = balanced_hyperplane(&a, &b, None, &Anchor::point(ipoint(&[0, 0])), &tol, &BisectOptions::default()).unwrap();
        assert_eq!(r.residual, int(0));
        let Witness::Hyperplane { s, .. } = r.witness else { panic!() };
        assert_eq!(s, rat(1, 2));
    }

    #[test]
    fn hyperplane_requires_equal_region_measures() {
        let g = GridSpec::unit(2);
        let a = CellSet::block(g.clone(), &[0, 0], &[1, 1]);
        let b = CellSet::block(g, &[0, 0], &[2, 1]);
        let err = balanced_hyperplane(&a, &b, None, &Anchor::point(ipoint(&[0, 0])), &rat(1, 10), &BisectOptions::default());
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn pencil_endpoints_are_opposite() {
        let anchor = Anchor::line(ipoint(&[0, 0, 0]), ipoint(&[0, 0, 1]));
        let h0 = pencil_halfspace(&anchor, &int(0)).unwrap();
        let h1 = pencil_halfspace(&anchor, &int(1)).unwrap();
        assert_eq!(h0.flipped(), h1);
        assert_eq!(h0.normal[2], int(0));
    }
}
