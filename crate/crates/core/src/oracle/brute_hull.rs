//! Hull volumes from the raw cell corners, computed without the kernel's
//! hull code: gift wrapping in the plane and exact Simpson slicing in space.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Num, Zero};

use crate::error::{Error, Result};
use crate::geom::cell::CellSet;
use crate::rational::Rational;

fn cross<T: Num + Clone>(o: &(T, T), a: &(T, T), b: &(T, T)) -> T {
    (a.0.clone() - o.0.clone()) * (b.1.clone() - o.1.clone()) - (a.1.clone() - o.1.clone()) * (b.0.clone() - o.0.clone())
}

fn dist2<T: Num + Clone>(a: &(T, T), b: &(T, T)) -> T {
    let dx = a.0.clone() - b.0.clone();
    let dy = a.1.clone() - b.1.clone();
    dx.clone() * dx + dy.clone() * dy
}

/// Gift wrapping. Returns the strict hull vertices counterclockwise.
pub fn jarvis<T: Num + Clone + PartialOrd>(points: &[(T, T)]) -> Vec<(T, T)> {
    let mut pts: Vec<(T, T)> = Vec::with_capacity(points.len());
    for p in points {
        if !pts.contains(p) {
            pts.push(p.clone());
        }
    }
    if pts.len() < 3 {
        return pts;
    }
    let start = (0..pts.len())
        .min_by(|&i, &j| {
            let (a, b) = (&pts[i], &pts[j]);
            a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap())
        })
        .unwrap();
    let mut hull = vec![start];
    let mut cur = start;
    loop {
        let mut cand = if cur == 0 { 1 } else { 0 };
        for r in 0..pts.len() {
            if r == cur || r == cand {
                continue;
            }
            let o = cross(&pts[cur], &pts[cand], &pts[r]);
            if o < T::zero() || (o == T::zero() && dist2(&pts[cur], &pts[r]) > dist2(&pts[cur], &pts[cand])) {
                cand = r;
            }
        }
        if cand == start || hull.len() > pts.len() {
            break;
        }
        hull.push(cand);
        cur = cand;
    }
    hull.into_iter().map(|i| pts[i].clone()).collect()
}

/// Twice the signed area of a polygon.
pub fn shoelace2<T: Num + Clone>(poly: &[(T, T)]) -> T {
    let n = poly.len();
    let mut s = T::zero();
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        s = s + a.0.clone() * b.1.clone() - a.1.clone() * b.0.clone();
    }
    s
}

fn corner_bound(s: &CellSet) -> Result<()> {
    let lim = 1i64 << 20;
    if s.cells().iter().any(|c| c.iter().any(|x| x.abs() > lim)) {
        return Err(Error::Invalid("cell coordinates too large for the brute hull".into()));
    }
    Ok(())
}

/// Volume of co(s) from all cell corners.
pub fn brute_hull_volume(s: &CellSet) -> Result<Rational> {
    if s.is_empty() {
        return Ok(Rational::zero());
    }
    corner_bound(s)?;
    let h = s.pitch().clone();
    let units = match s.dim() {
        1 => {
            let lo = s.cells().iter().map(|c| c[0]).min().unwrap();
            let hi = s.cells().iter().map(|c| c[0]).max().unwrap() + 1;
            Rational::from_integer((hi - lo).into())
        }
        2 => {
            let mut pts = Vec::with_capacity(4 * s.len());
            for c in s.cells() {
                let (x, y) = (c[0] as i128, c[1] as i128);
                pts.extend([(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]);
            }
            Rational::new(shoelace2(&jarvis(&pts)).abs().into(), 2.into())
        }
        3 => hull_volume_3d(s),
        d => return Err(Error::UnsupportedDimension { dim: d }),
    };
    let mut vol = units;
    for _ in 0..s.dim() {
        vol *= &h;
    }
    Ok(vol)
}

type Level = (i64, Vec<(i128, i128)>);

fn hull_volume_3d(s: &CellSet) -> Rational {
    let mut by_z: BTreeMap<i64, Vec<(i128, i128)>> = BTreeMap::new();
    for c in s.cells() {
        let (x, y) = (c[0] as i128, c[1] as i128);
        for z in [c[2], c[2] + 1] {
            by_z.entry(z).or_default().extend([(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]);
        }
    }
    let levels: Vec<Level> = by_z.into_iter().map(|(z, p)| (z, jarvis(&p))).collect();
    let mut vol = Rational::zero();
    for w in levels.windows(2) {
        let (z0, z1) = (w[0].0, w[1].0);
        let a0 = section_area(&levels, 2 * z0);
        let am = section_area(&levels, z0 + z1);
        let a1 = section_area(&levels, 2 * z1);
        vol += Rational::from_integer((z1 - z0).into()) * (a0 + am * Rational::from_integer(4.into()) + a1) / Rational::from_integer(6.into());
    }
    vol
}

/// Area of the horizontal section at height `zz / 2`: hull of every segment
/// between corner points on either side of it.
fn section_area(levels: &[Level], zz: i64) -> Rational {
    let below: Vec<&Level> = levels.iter().filter(|l| 2 * l.0 <= zz).collect();
    let above: Vec<&Level> = levels.iter().filter(|l| 2 * l.0 >= zz).collect();
    let mut span = BigInt::from(2);
    for lo in &below {
        for hi in &above {
            if hi.0 > lo.0 {
                span = span.lcm(&BigInt::from(2 * (hi.0 - lo.0)));
            }
        }
    }
    if let Ok(sc) = i128::try_from(&span) {
        if sc < 1i128 << 40 {
            return section_area_int(&below, &above, zz, sc);
        }
    }
    section_area_rat(&below, &above, zz)
}

fn section_area_int(below: &[&Level], above: &[&Level], zz: i64, sc: i128) -> Rational {
    let mut pts = Vec::new();
    for lo in below {
        for hi in above {
            if hi.0 == lo.0 {
                pts.extend(lo.1.iter().map(|p| (p.0 * sc, p.1 * sc)));
                continue;
            }
            let f = sc / (2 * (hi.0 - lo.0)) as i128;
            let (wa, wb) = ((2 * hi.0 - zz) as i128, (zz - 2 * lo.0) as i128);
            for a in &lo.1 {
                for b in &hi.1 {
                    pts.push((f * (wa * a.0 + wb * b.0), f * (wa * a.1 + wb * b.1)));
                }
            }
        }
    }
    Rational::new(shoelace2(&jarvis(&pts)).abs().into(), BigInt::from(2) * BigInt::from(sc) * BigInt::from(sc))
}

fn section_area_rat(below: &[&Level], above: &[&Level], zz: i64) -> Rational {
    let r = |x: i128| Rational::from_integer(x.into());
    let mut pts = Vec::new();
    for lo in below {
        for hi in above {
            if hi.0 == lo.0 {
                pts.extend(lo.1.iter().map(|p| (r(p.0), r(p.1))));
                continue;
            }
            let den = r(2 * (hi.0 - lo.0) as i128);
            let wa = r((2 * hi.0 - zz) as i128) / &den;
            let wb = r((zz - 2 * lo.0) as i128) / &den;
            for a in &lo.1 {
                for b in &hi.1 {
                    pts.push((&wa * r(a.0) + &wb * r(b.0), &wa * r(a.1) + &wb * r(b.1)));
                }
            }
        }
    }
    let area2 = shoelace2(&jarvis(&pts));
    if area2 < Rational::zero() {
        -area2 / r(2)
    } else {
        area2 / r(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::cell::GridSpec;
    use crate::rational::{int, rat};

    #[test]
    fn jarvis_square_with_collinear_points() {
        let pts = [(0i128, 0), (1, 0), (2, 0), (2, 2), (0, 2), (1, 1), (0, 1)];
        let h = jarvis(&pts);
        assert_eq!(h.len(), 4);
        assert_eq!(shoelace2(&h), 8);
    }

    #[test]
    fn staircase_and_tetra_like_sets() {
        let g2 = GridSpec::new(2, rat(1, 2)).unwrap();
        let l = CellSet::new(g2, [[0, 0, 0], [1, 0, 0], [0, 1, 0]]);
        assert_eq!(brute_hull_volume(&l).unwrap(), rat(7, 8));

        let corner = CellSet::new(GridSpec::unit(3), [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        let k = crate::geom::polytope::convex_hull(&corner).unwrap().volume();
        assert_eq!(brute_hull_volume(&corner).unwrap(), k);
        assert_eq!(k, rat(17, 3));

        let tall = CellSet::new(GridSpec::unit(3), [[0, 0, 0], [3, 0, 7]]);
        let k = crate::geom::polytope::convex_hull(&tall).unwrap().volume();
        assert_eq!(brute_hull_volume(&tall).unwrap(), k);
        assert_eq!(k, int(11));
        assert_eq!(brute_hull_volume(&CellSet::block(GridSpec::unit(3), &[0, 0, 0], &[2, 3, 4])).unwrap(), int(24));
    }
}
