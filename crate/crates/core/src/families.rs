//! Seeded instance generators shared by the tests, the acceptance run and the
//! command line tool.
//!
//! One 64-bit seed drives everything; instance `i` draws from stream `i` of
//! that seed, so instances can be produced in any order or in parallel.

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::deficits::AxisBox;
use crate::error::{Error, Result};
use crate::geom::cell::{Cell, CellSet, GridSpec, Weight};
use crate::geom::polytope::Polytope;
use crate::rational::{dyadic, int, rat, Point, Rational};

pub type InstanceRng = ChaCha8Rng;

/// Generator for instance `index` under `seed`.
pub fn instance_rng(seed: u64, index: u64) -> InstanceRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// Weights used by the random families.
pub const WEIGHTS: [(i64, i64); 3] = [(1, 2), (1, 3), (1, 4)];

pub fn pick_weight(rng: &mut InstanceRng) -> Weight {
    let (p, q) = WEIGHTS[rng.random_range(0..WEIGHTS.len())];
    Weight::from_ratio(p, q).expect("fixed weights are valid")
}

/// Swap the first two axes.
pub fn transpose(s: &CellSet) -> CellSet {
    s.map_cells(|c| [c[1], c[0], c[2]])
}

/// `A = [0, 1+h] × [0,1]^(dim-1)` at pitch `h = 1/n`, and `B` its transpose.
pub fn sharp_pair(dim: usize, n: i64) -> Result<(CellSet, CellSet)> {
    if !(2..=3).contains(&dim) || n < 1 {
        return Err(Error::Invalid("sharp pair needs dim 2 or 3 and n >= 1".into()));
    }
    let g = GridSpec::new(dim, rat(1, n))?;
    let mut hi = vec![n; dim];
    hi[0] = n + 1;
    let a = CellSet::block(g, &vec![0; dim], &hi);
    let b = transpose(&a);
    Ok((a, b))
}

/// Up to `n` distinct cells scattered in a box of about `2n` cells.
pub fn random_cells(rng: &mut InstanceRng, grid: &GridSpec, n: usize) -> CellSet {
    let d = grid.dim;
    let side = ((2 * n.max(1)) as f64).powf(1.0 / d as f64).ceil() as i64;
    let cells: Vec<Cell> = (0..n)
        .map(|_| {
            let mut c = [0i64; 3];
            for x in c.iter_mut().take(d) {
                *x = rng.random_range(0..side);
            }
            c
        })
        .collect();
    CellSet::new(grid.clone(), cells)
}

/// Hull of `k` random points of `[0, size]^dim` (cell units, quarter-cell
/// resolution), redrawn until full-dimensional.
pub fn random_hull(rng: &mut InstanceRng, grid: &GridSpec, size: i64, k: usize) -> Result<Polytope> {
    let d = grid.dim;
    let h = grid.pitch.clone();
    loop {
        let pts: Vec<Point> = (0..k.max(d + 1))
            .map(|_| (0..d).map(|_| &h * rat(rng.random_range(0..=4 * size), 4)).collect())
            .collect();
        let p = Polytope::hull_of(d, &pts)?;
        if !p.is_degenerate() {
            return Ok(p);
        }
    }
}

/// Cells whose centers lie in the hull of `k` random points of `[0, size]^dim`
/// (cell units).
pub fn random_convex(rng: &mut InstanceRng, grid: &GridSpec, size: i64, k: usize) -> Result<CellSet> {
    loop {
        let p = random_hull(rng, grid, size, k)?;
        let s = rasterize(grid, &p, size);
        if !s.is_empty() {
            return Ok(s);
        }
    }
}

/// `p` scaled by `f` about its vertex centroid.
fn scaled(p: &Polytope, f: f64) -> Result<Polytope> {
    let d = p.dim();
    let n = int(p.vertices().len() as i64);
    let c: Point = (0..d).map(|k| p.vertices().iter().map(|v| v[k].clone()).sum::<Rational>() / &n).collect();
    let f = dyadic(f, 20);
    let pts: Vec<Point> = p.vertices().iter().map(|v| (0..d).map(|k| &c[k] + &f * (&v[k] - &c[k])).collect()).collect();
    Polytope::hull_of(d, &pts)
}

/// Cells of `[0, size)^dim` with center in `p`, filled line by line along
/// the first axis.
pub fn rasterize(grid: &GridSpec, p: &Polytope, size: i64) -> CellSet {
    let d = grid.dim;
    let h = &grid.pitch;
    let half = rat(1, 2);
    let mut cells = Vec::new();
    let lines = size.pow(d as u32 - 1);
    for idx in 0..lines {
        let mut c = [0i64; 3];
        let mut r = idx;
        for x in c.iter_mut().take(d).skip(1) {
            *x = r % size;
            r /= size;
        }
        let (mut lo, mut hi) = (0i64, size - 1);
        for f in p.facets() {
            let mut rhs = f.offset.clone();
            for k in 1..d {
                rhs -= &f.normal[k] * h * (int(c[k]) + &half);
            }
            let n0 = &f.normal[0];
            if n0.is_zero() {
                if rhs.is_negative() {
                    hi = -1;
                }
                continue;
            }
            let bound = rhs / (n0 * h) - &half;
            if n0.is_positive() {
                hi = hi.min(bound.floor().to_integer().to_i64().unwrap_or(i64::MAX).max(-1));
            } else {
                lo = lo.max(bound.ceil().to_integer().to_i64().unwrap_or(i64::MIN).min(size));
            }
        }
        for x in lo..=hi {
            c[0] = x;
            cells.push(c);
        }
    }
    CellSet::new(grid.clone(), cells)
}

fn centroid(s: &CellSet) -> [f64; 3] {
    let mut m = [0.0; 3];
    for c in s.cells() {
        for k in 0..3 {
            m[k] += c[k] as f64 + 0.5;
        }
    }
    m.map(|x| x / s.len().max(1) as f64)
}

fn dist2(c: &Cell, m: &[f64; 3], d: usize) -> f64 {
    (0..d).map(|k| (c[k] as f64 + 0.5 - m[k]).powi(2)).sum()
}

/// Grow or shrink `s` to exactly `target` cells: drop the cells farthest from
/// the centroid, or add face neighbors nearest to it.
pub fn equalize(s: &CellSet, target: usize) -> CellSet {
    let d = s.dim();
    let m = centroid(s);
    let key = |c: &Cell| (dist2(c, &m, d), *c);
    if s.len() >= target {
        let mut cells = s.cells().to_vec();
        cells.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        cells.truncate(target);
        return CellSet::new(s.grid().clone(), cells);
    }
    let mut cur = s.clone();
    while cur.len() < target {
        let mut frontier: Vec<Cell> = Vec::new();
        for c in cur.cells() {
            for k in 0..d {
                for step in [-1, 1] {
                    let mut n = *c;
                    n[k] += step;
                    if !cur.contains(&n) {
                        frontier.push(n);
                    }
                }
            }
        }
        if frontier.is_empty() {
            frontier.push([0; 3]);
        }
        frontier.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        frontier.dedup();
        frontier.truncate(target - cur.len());
        let add = CellSet::new(s.grid().clone(), frontier);
        cur = cur.union(&add).expect("same grid");
    }
    cur
}

/// Random instance for the oracle comparison: dims 1..=3, at most `max_cells`
/// cells per set, weight from [`WEIGHTS`].
pub fn oracle_instance(seed: u64, index: u64, max_cells: usize) -> Result<(CellSet, CellSet, Weight)> {
    let mut rng = instance_rng(seed, index);
    let dim = rng.random_range(1..=3usize);
    let pitch = rat(1, rng.random_range(1..=4));
    let g = GridSpec::new(dim, pitch)?;
    let t = pick_weight(&mut rng);
    let draw = |rng: &mut InstanceRng| -> Result<CellSet> {
        if rng.random_bool(0.5) {
            let n = rng.random_range(1..=max_cells);
            Ok(random_cells(rng, &g, n))
        } else {
            let size = match dim {
                1 => rng.random_range(2..=60),
                2 => rng.random_range(2..=12),
                _ => rng.random_range(2..=5),
            };
            let s = random_convex(rng, &g, size, 6)?;
            Ok(if s.len() > max_cells { equalize(&s, max_cells) } else { s })
        }
    };
    let a = draw(&mut rng)?;
    let b = draw(&mut rng)?.translate(&[rng.random_range(-3..=3), rng.random_range(-3..=3), rng.random_range(-3..=3)]);
    Ok((a, b, t))
}

/// Random 1D pair of equal volume: a few runs separated by short gaps.
pub fn random_1d_pair(rng: &mut InstanceRng) -> Result<(CellSet, CellSet, Weight)> {
    let g = GridSpec::new(1, rat(1, 8))?;
    let n = rng.random_range(4..=64usize);
    let t = Weight::from_ratio(1, rng.random_range(2..=5))?;
    let one = |rng: &mut InstanceRng| {
        let runs = rng.random_range(1..=4usize).min(n);
        let mut cuts: Vec<usize> = (0..runs - 1).map(|_| rng.random_range(1..n)).collect();
        cuts.sort_unstable();
        cuts.dedup();
        let mut cells = Vec::with_capacity(n);
        let (mut x, mut placed) = (rng.random_range(-4..=4i64), 0usize);
        for &cut in cuts.iter().chain(std::iter::once(&n)) {
            while placed < cut {
                cells.push([x, 0, 0]);
                x += 1;
                placed += 1;
            }
            x += rng.random_range(1..=3);
        }
        CellSet::new(g.clone(), cells)
    };
    let a = one(rng);
    let b = one(rng);
    Ok((a, b, t))
}

/// Two intersecting axis-aligned boxes with corners on the `1/12` grid.
pub fn random_box_pair(rng: &mut InstanceRng) -> Result<(AxisBox, AxisBox)> {
    let d = rng.random_range(1..=3usize);
    let q = 12;
    let mut r = (Vec::new(), Vec::new());
    let mut s = (Vec::new(), Vec::new());
    for _ in 0..d {
        let (l0, w0) = (rng.random_range(-24..=24i64), rng.random_range(1..=48i64));
        let w1 = rng.random_range(1..=48i64);
        let l1 = rng.random_range(l0 - w1 + 1..l0 + w0);
        r.0.push(rat(l0, q));
        r.1.push(rat(l0 + w0, q));
        s.0.push(rat(l1, q));
        s.1.push(rat(l1 + w1, q));
    }
    Ok((AxisBox::new(r.0, r.1)?, AxisBox::new(s.0, s.1)?))
}

/// Parameters of one perturbed-convex instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedParams {
    pub n: i64,
    pub m: i64,
    pub notch_w: i64,
    pub notch_d: i64,
}

/// Rectangle `[0, n+m) × [0, n)` at pitch `1/n` with a notch of `w × d` cells
/// cut from the middle of its bottom edge; `B` is its transpose. The sliver
/// drives the optimal-translation distance, the notch drives the hull gap.
pub fn perturbed_pair(p: &PerturbedParams) -> Result<(CellSet, CellSet)> {
    let g = GridSpec::new(2, rat(1, p.n))?;
    let x0 = (p.n + p.m - p.notch_w) / 2;
    let a = CellSet::block(g, &[0, 0], &[p.n + p.m, p.n])
        .filter(|c| !(c[0] >= x0 && c[0] < x0 + p.notch_w && c[1] < p.notch_d));
    let b = transpose(&a);
    Ok((a, b))
}

/// Sliver `m` log-uniform in `[3, 18]`, notch area about `κ m²` with
/// `κ ∈ [1/2, 3/2]`.
pub fn perturbed_params(rng: &mut InstanceRng, n: i64) -> PerturbedParams {
    let m = (3f64.ln() + rng.random::<f64>() * (18f64.ln() - 3f64.ln())).exp().round() as i64;
    let kappa = 0.5 + rng.random::<f64>();
    let area = (kappa * (m * m) as f64).max(1.0);
    let notch_d = ((area.sqrt() / 4.0).round() as i64).max(1);
    let notch_w = ((area / notch_d as f64).round() as i64).clamp(1, n - 2);
    PerturbedParams { n, m, notch_w, notch_d }
}

/// Two random convex rasterizations of equal volume in `[0, size)^dim`. The
/// larger hull is shrunk toward the smaller volume before the last few cells
/// are matched with [`equalize`].
pub fn intconvex_pair(rng: &mut InstanceRng, grid: &GridSpec, size: i64) -> Result<(CellSet, CellSet)> {
    let (pa, ra, pb, rb) = loop {
        let pa = random_hull(rng, grid, size, 8)?;
        let pb = random_hull(rng, grid, size, 8)?;
        let (ra, rb) = (rasterize(grid, &pa, size), rasterize(grid, &pb, size));
        if !ra.is_empty() && !rb.is_empty() {
            break (pa, ra, pb, rb);
        }
    };
    let (target, mut shrink, mut other, swapped) = if ra.len() <= rb.len() { (ra, pb, rb, false) } else { (rb, pa, ra, true) };
    for _ in 0..4 {
        if other.len() == target.len() {
            break;
        }
        let f = (target.len() as f64 / other.len() as f64).powf(1.0 / grid.dim as f64);
        let next = scaled(&shrink, f)?;
        let r = rasterize(grid, &next, size);
        if r.is_empty() {
            break;
        }
        shrink = next;
        other = r;
    }
    let other = equalize(&other, target.len());
    Ok(if swapped { (other, target) } else { (target, other) })
}
