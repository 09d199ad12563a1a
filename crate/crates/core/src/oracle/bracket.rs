//! Lower/upper bounds on the measure of a cell set inside a simplex by
//! subsampling each cell into `k^dim` boxes.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::cell::CellSet;
use crate::rational::{Point, Rational};

/// Facets `n·x ≥ c` of a nondegenerate simplex, derived from its vertices.
pub fn simplex_facets(vertices: &[Point]) -> Result<Vec<(Vec<Rational>, Rational)>> {
    let d = vertices.len().saturating_sub(1);
    if d == 0 || d > 3 || vertices.iter().any(|v| v.len() != d) {
        return Err(Error::Invalid("simplex needs dim+1 vertices of length dim".into()));
    }
    let mut out = Vec::with_capacity(d + 1);
    for skip in 0..=d {
        let face: Vec<&Point> = vertices.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| v).collect();
        let n: Vec<Rational> = match d {
            1 => vec![Rational::from_integer(1.into())],
            2 => {
                let e = [&face[1][0] - &face[0][0], &face[1][1] - &face[0][1]];
                vec![-e[1].clone(), e[0].clone()]
            }
            _ => {
                let u: Vec<Rational> = (0..3).map(|k| &face[1][k] - &face[0][k]).collect();
                let w: Vec<Rational> = (0..3).map(|k| &face[2][k] - &face[0][k]).collect();
                vec![
                    &u[1] * &w[2] - &u[2] * &w[1],
                    &u[2] * &w[0] - &u[0] * &w[2],
                    &u[0] * &w[1] - &u[1] * &w[0],
                ]
            }
        };
        let dotp = |p: &Point| n.iter().zip(p).fold(Rational::zero(), |s, (a, b)| s + a * b);
        let c = dotp(face[0]);
        let side = dotp(&vertices[skip]) - &c;
        if side.is_zero() {
            return Err(Error::Degenerate("simplex has zero volume".into()));
        }
        if side.is_negative() {
            out.push((n.iter().map(|x| -x).collect(), -c));
        } else {
            out.push((n, c));
        }
    }
    Ok(out)
}

/// Range of `n·x` over the box `[lo, lo + w]^dim`.
fn range(n: &[Rational], lo: &[Rational], w: &Rational) -> (Rational, Rational) {
    let mut min = Rational::zero();
    let mut max = Rational::zero();
    for (a, l) in n.iter().zip(lo) {
        let base = a * l;
        let ext = a * w;
        if ext.is_negative() {
            min += &base + &ext;
            max += base;
        } else {
            max += &base + &ext;
            min += base;
        }
    }
    (min, max)
}

/// Counts of subboxes fully inside the simplex and meeting every facet's
/// closed halfspace; `(inside, meeting) · (h/k)^dim` bracket the true measure.
pub fn region_bracket(s: &CellSet, vertices: &[Point], k: u32) -> Result<(Rational, Rational)> {
    let d = s.dim();
    if vertices.len() != d + 1 {
        return Err(Error::Invalid("simplex dimension does not match the set".into()));
    }
    let facets = simplex_facets(vertices)?;
    let h = s.pitch().clone();
    let sub = &h / Rational::from_integer(k.into());
    let kd = (k as u64).pow(d as u32);
    let (mut inside, mut meeting) = (0u64, 0u64);
    for c in s.cells() {
        let lo: Vec<Rational> = (0..d).map(|i| &h * Rational::from_integer(c[i].into())).collect();
        let mut all_in = true;
        let mut missed = false;
        for (n, off) in &facets {
            let (mn, mx) = range(n, &lo, &h);
            if mx < *off {
                missed = true;
                break;
            }
            if mn < *off {
                all_in = false;
            }
        }
        if missed {
            continue;
        }
        if all_in {
            inside += kd;
            meeting += kd;
            continue;
        }
        let steps = k as i64;
        let mut idx = vec![0i64; d];
        loop {
            let slo: Vec<Rational> = (0..d).map(|i| &lo[i] + &sub * Rational::from_integer(idx[i].into())).collect();
            let mut ins = true;
            let mut meets = true;
            for (n, off) in &facets {
                let (mn, mx) = range(n, &slo, &sub);
                if mx < *off {
                    meets = false;
                    break;
                }
                if mn < *off {
                    ins = false;
                }
            }
            if meets {
                meeting += 1;
                if ins {
                    inside += 1;
                }
            }
            let mut i = 0;
            while i < d {
                idx[i] += 1;
                if idx[i] < steps {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == d {
                break;
            }
        }
    }
    let mut unit = Rational::from_integer(1.into());
    for _ in 0..d {
        unit *= &sub;
    }
    Ok((&unit * Rational::from_integer(inside.into()), unit * Rational::from_integer(meeting.into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::cell::GridSpec;
    use crate::rational::{ipoint, rat};

    #[test]
    fn bracket_contains_exact_triangle_measure() {
        let s = CellSet::block(GridSpec::unit(2), &[0, 0], &[2, 2]);
        let tri = vec![ipoint(&[0, 0]), ipoint(&[2, 0]), ipoint(&[0, 2])];
        let (lo, hi) = region_bracket(&s, &tri, 8).unwrap();
        assert!(lo <= rat(2, 1) && rat(2, 1) <= hi);
        assert!(&hi - &lo <= rat(1, 2));
        let (lo1, hi1) = region_bracket(&s, &tri, 1).unwrap();
        assert!(lo1 <= lo && hi <= hi1);
    }
}
