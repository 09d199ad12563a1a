use num_traits::Signed;

use crate::error::{Error, Result};
use crate::geom::polytope::{HalfSpace, Simplex};
use crate::rational::{dot, sub, Point, Rational};

/// The `dim + 1` cones from an interior apex over the facets of a simplex.
///
/// Cone `i` is spanned by the vertices other than `v_i`. Together the cones
/// cover space and overlap only on their boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeFrame {
    apex: Point,
    simplex: Simplex,
    cones: Vec<Vec<HalfSpace>>,
}

/// Normal of the hyperplane through `apex` and the points `ws` (`dim - 1` of them).
fn hyperplane_normal(apex: &[Rational], ws: &[&Point]) -> Vec<Rational> {
    match apex.len() {
        1 => vec![Rational::from_integer(1.into())],
        2 => {
            let d = sub(ws[0], apex);
            vec![-d[1].clone(), d[0].clone()]
        }
        _ => {
            let a = sub(ws[0], apex);
            let b = sub(ws[1], apex);
            vec![
                &a[1] * &b[2] - &a[2] * &b[1],
                &a[2] * &b[0] - &a[0] * &b[2],
                &a[0] * &b[1] - &a[1] * &b[0],
            ]
        }
    }
}

impl ConeFrame {
    pub fn new(apex: Point, simplex: Simplex) -> Result<Self> {
        if apex.len() != simplex.dim() {
            return Err(Error::Invalid("apex dimension differs from simplex".into()));
        }
        if !simplex.strictly_contains(&apex) {
            return Err(Error::Degenerate("cone apex must be strictly inside the simplex".into()));
        }
        let vs = simplex.vertices();
        let n = vs.len();
        let mut cones = Vec::with_capacity(n);
        for i in 0..n {
            let mut hs = Vec::with_capacity(n - 1);
            for j in (0..n).filter(|&j| j != i) {
                let ws: Vec<&Point> = (0..n).filter(|&k| k != i && k != j).map(|k| &vs[k]).collect();
                let mut normal = hyperplane_normal(&apex, &ws);
                if dot(&normal, &sub(&vs[j], &apex)).is_positive() {
                    normal = normal.iter().map(|x| -x).collect();
                }
                let offset = dot(&normal, &apex);
                hs.push(HalfSpace::new(normal, offset)?.normalized());
            }
            cones.push(hs);
        }
        Ok(ConeFrame { apex, simplex, cones })
    }

    pub fn apex(&self) -> &Point {
        &self.apex
    }

    pub fn simplex(&self) -> &Simplex {
        &self.simplex
    }

    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    /// Half-spaces of cone `i` (the cone opposite vertex `i`).
    pub fn cone(&self, i: usize) -> &[HalfSpace] {
        &self.cones[i]
    }

    pub fn cones(&self) -> &[Vec<HalfSpace>] {
        &self.cones
    }

    /// Index of a cone whose interior-or-boundary contains `x`.
    pub fn locate(&self, x: &[Rational]) -> usize {
        (0..self.cones.len()).find(|&i| self.cones[i].iter().all(|h| h.contains(x))).unwrap_or(0)
    }

    /// The same frame moved by `v`.
    pub fn translated(&self, v: &[Rational]) -> ConeFrame {
        let shift = |p: &Point| p.iter().zip(v).map(|(a, b)| a + b).collect::<Point>();
        let simplex = Simplex::new(self.simplex.vertices().iter().map(shift).collect()).expect("translation keeps simplex");
        let cones = self
            .cones
            .iter()
            .map(|hs| hs.iter().map(|h| HalfSpace { normal: h.normal.clone(), offset: &h.offset + dot(&h.normal, v) }).collect())
            .collect();
        ConeFrame { apex: shift(&self.apex), simplex, cones }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ipoint, point};

    #[test]
    fn cones_contain_their_facets() {
        let s = Simplex::new(vec![ipoint(&[0, 0]), ipoint(&[2, 0]), ipoint(&[0, 2])]).unwrap();
        let f = ConeFrame::new(point(&[(1, 2), (1, 2)]), s.clone()).unwrap();
        for i in 0..3 {
            for k in (0..3).filter(|&k| k != i) {
                assert!(f.cone(i).iter().all(|h| h.contains(&s.vertices()[k])));
            }
            assert!(!f.cone(i).iter().all(|h| h.contains(&s.vertices()[i])));
        }
    }

    #[test]
    fn apex_must_be_interior() {
        let s = Simplex::new(vec![ipoint(&[0]), ipoint(&[2])]).unwrap();
        assert!(ConeFrame::new(ipoint(&[0]), s.clone()).is_err());
        let f = ConeFrame::new(ipoint(&[1]), s).unwrap();
        assert!(f.cone(0).iter().all(|h| h.contains(&ipoint(&[5]))));
        assert!(f.cone(1).iter().all(|h| h.contains(&ipoint(&[-5]))));
    }
}
