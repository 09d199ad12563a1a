//! Union volume of axis-aligned boxes by recursive slab sweep.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::cell::{CellSet, Weight};
use crate::rational::Rational;

/// A list of possibly overlapping axis-aligned boxes `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxList {
    pub dim: usize,
    pub boxes: Vec<(Vec<Rational>, Vec<Rational>)>,
}

impl BoxList {
    pub fn new(dim: usize) -> Self {
        BoxList { dim, boxes: Vec::new() }
    }

    pub fn push(&mut self, lo: Vec<Rational>, hi: Vec<Rational>) {
        self.boxes.push((lo, hi));
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }
}

type IBox = Vec<(i128, i128)>;

/// Union length/area/volume of integer boxes, one axis at a time.
fn union_measure(mut boxes: Vec<IBox>) -> i128 {
    boxes.retain(|b| b.iter().all(|(l, h)| l < h));
    if boxes.is_empty() {
        return 0;
    }
    if boxes[0].len() == 1 {
        let mut iv: Vec<(i128, i128)> = boxes.into_iter().map(|b| b[0]).collect();
        iv.sort_unstable();
        let (mut total, mut cur) = (0i128, iv[0]);
        for &(l, h) in &iv[1..] {
            if l > cur.1 {
                total += cur.1 - cur.0;
                cur = (l, h);
            } else if h > cur.1 {
                cur.1 = h;
            }
        }
        return total + cur.1 - cur.0;
    }
    let mut xs: Vec<i128> = boxes.iter().flat_map(|b| [b[0].0, b[0].1]).collect();
    xs.sort_unstable();
    xs.dedup();
    let slab = |w: &[i128]| -> i128 {
        let (x0, x1) = (w[0], w[1]);
        let mut rest: Vec<IBox> = boxes.iter().filter(|b| b[0].0 <= x0 && b[0].1 >= x1).map(|b| b[1..].to_vec()).collect();
        rest.sort_unstable();
        rest.dedup();
        (x1 - x0) * union_measure(rest)
    };
    if boxes.len() > 256 {
        xs.par_windows(2).map(slab).sum()
    } else {
        xs.windows(2).map(slab).sum()
    }
}

/// Exact volume of the union. Coordinates are brought to a common denominator
/// and swept as integers.
pub fn sweep_union_volume(boxes: &BoxList) -> Result<Rational> {
    if boxes.dim > 3 {
        return Err(Error::UnsupportedDimension { dim: boxes.dim });
    }
    if boxes.is_empty() {
        return Ok(Rational::zero());
    }
    let mut den = BigInt::one();
    for (lo, hi) in &boxes.boxes {
        for x in lo.iter().chain(hi) {
            den = den.lcm(x.denom());
        }
    }
    let scale = Rational::from_integer(den.clone());
    let to_int = |x: &Rational| -> Result<i128> {
        (x * &scale).to_integer().to_i128().ok_or_else(|| Error::Invalid("box coordinate too large for the sweep".into()))
    };
    let mut ib = Vec::with_capacity(boxes.len());
    for (lo, hi) in &boxes.boxes {
        let mut b = Vec::with_capacity(boxes.dim);
        for k in 0..boxes.dim {
            b.push((to_int(&lo[k])?, to_int(&hi[k])?));
        }
        ib.push(b);
    }
    ib.sort_unstable();
    ib.dedup();
    let count = union_measure(ib);
    let mut denom = BigInt::one();
    for _ in 0..boxes.dim {
        denom *= &den;
    }
    Ok(Rational::new(BigInt::from(count), denom))
}

pub const DEFAULT_PAIR_CAP: usize = 1_000_000;

/// The raw boxes `h(tα + (1-t)β) + [0,h]^dim` for all cell pairs, in rational
/// coordinates, without any lattice bookkeeping.
pub fn minkowski_direct_boxes(a: &CellSet, b: &CellSet, t: &Weight, cap: usize) -> Result<BoxList> {
    a.grid().check_same(b.grid())?;
    let pairs = a.len().saturating_mul(b.len());
    if pairs > cap {
        return Err(Error::PairCap { pairs, cap });
    }
    let d = a.dim();
    let h = a.pitch();
    let (tt, ss) = (t.t().clone(), t.one_minus());
    let mut out = BoxList::new(d);
    for ca in a.cells() {
        for cb in b.cells() {
            let lo: Vec<Rational> = (0..d)
                .map(|k| h * (&tt * Rational::from_integer(ca[k].into()) + &ss * Rational::from_integer(cb[k].into())))
                .collect();
            let hi = lo.iter().map(|x| x + h).collect();
            out.push(lo, hi);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::cell::GridSpec;
    use crate::rational::{int, rat};

    #[test]
    fn union_examples() {
        let mut bl = BoxList::new(2);
        bl.push(vec![int(0), int(0)], vec![int(1), int(1)]);
        bl.push(vec![int(3), int(0)], vec![int(4), int(1)]);
        assert_eq!(sweep_union_volume(&bl).unwrap(), int(2));

        let mut bl = BoxList::new(2);
        bl.push(vec![int(0), int(0)], vec![int(1), int(1)]);
        bl.push(vec![rat(1, 2), int(0)], vec![rat(3, 2), int(1)]);
        assert_eq!(sweep_union_volume(&bl).unwrap(), rat(3, 2));

        assert_eq!(sweep_union_volume(&BoxList::new(3)).unwrap(), int(0));
    }

    #[test]
    fn direct_boxes_for_gapped_interval() {
        let a = CellSet::new(GridSpec::unit(1), [[0, 0, 0], [2, 0, 0]]);
        let bl = minkowski_direct_boxes(&a, &a, &Weight::from_ratio(1, 2).unwrap(), DEFAULT_PAIR_CAP).unwrap();
        let lows: Vec<Rational> = bl.boxes.iter().map(|(l, _)| l[0].clone()).collect();
        assert_eq!(lows, vec![int(0), int(1), int(1), int(2)]);
        assert_eq!(sweep_union_volume(&bl).unwrap(), int(3));
        assert!(minkowski_direct_boxes(&a, &a, &Weight::from_ratio(1, 2).unwrap(), 3).is_err());
    }
}
