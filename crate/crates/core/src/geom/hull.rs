//! Exact convex hulls in dimensions 1 to 3, generic over an ordered exact scalar.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::rational::Rational;

/// Scalars the hull code can run on: `i128` for lattice corners, `Rational` in general.
pub trait HullScalar: Clone + Ord + Signed + std::fmt::Debug {
    fn to_rational(&self) -> Rational;
}

impl HullScalar for i128 {
    fn to_rational(&self) -> Rational {
        Rational::from_integer(BigInt::from(*self))
    }
}

impl HullScalar for Rational {
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

/// Output of a hull computation on indexed input points.
#[derive(Debug, Clone)]
pub struct HullResult<T> {
    /// Indices of the extreme points. 2D: counter-clockwise from the lex-smallest;
    /// otherwise lexicographic by coordinates.
    pub vertices: Vec<usize>,
    /// Facet planes `n·x <= c` when the hull is full-dimensional.
    pub facets: Vec<(Vec<T>, T)>,
    /// Dimension of the affine span (0 for a single point).
    pub affine_dim: usize,
}

fn sub<T: HullScalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

fn dot<T: HullScalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn cross<T: HullScalar>(a: &[T], b: &[T]) -> Vec<T> {
    vec![
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

/// Twice the signed area of `(o, a, b)`; positive for a left turn.
pub fn orient2<T: HullScalar>(o: &[T], a: &[T], b: &[T]) -> T {
    (a[0].clone() - o[0].clone()) * (b[1].clone() - o[1].clone())
        - (a[1].clone() - o[1].clone()) * (b[0].clone() - o[0].clone())
}

/// `det(b-a, c-a, p-a)`.
pub fn orient3<T: HullScalar>(a: &[T], b: &[T], c: &[T], p: &[T]) -> T {
    dot(&cross(&sub(b, a), &sub(c, a)), &sub(p, a))
}

/// Monotone chain with strict turns. Returns indices counter-clockwise from the
/// lex-smallest point; collinear inputs give the two endpoints.
pub fn hull_2d<T: HullScalar>(pts: &[Vec<T>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&i, &j| pts[i].cmp(&pts[j]));
    idx.dedup_by(|i, j| pts[*i] == pts[*j]);
    if idx.len() <= 2 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && !orient2(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i]).is_positive()
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && !orient2(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i]).is_positive()
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && pts[lower[0]] == pts[lower[1]] {
        lower.pop();
    }
    lower
}

fn lex_extremes<T: HullScalar>(pts: &[Vec<T>]) -> Vec<usize> {
    let lo = (0..pts.len()).min_by(|&i, &j| pts[i].cmp(&pts[j])).expect("nonempty");
    let hi = (0..pts.len()).max_by(|&i, &j| pts[i].cmp(&pts[j])).expect("nonempty");
    if pts[lo] == pts[hi] {
        vec![lo]
    } else {
        vec![lo, hi]
    }
}

/// Convex hull of `pts` (all of length `dim`, `dim` in 1..=3). `pts` must be nonempty.
pub fn hull<T: HullScalar>(dim: usize, pts: &[Vec<T>]) -> HullResult<T> {
    assert!(!pts.is_empty(), "hull of empty point set");
    match dim {
        1 => {
            let v = lex_extremes(pts);
            let facets = if v.len() == 2 {
                vec![
                    (vec![T::one()], pts[v[1]][0].clone()),
                    (vec![-T::one()], -pts[v[0]][0].clone()),
                ]
            } else {
                Vec::new()
            };
            HullResult { affine_dim: v.len() - 1, vertices: v, facets }
        }
        2 => {
            let v = hull_2d(pts);
            if v.len() <= 2 {
                return HullResult { affine_dim: v.len() - 1, vertices: v, facets: Vec::new() };
            }
            let facets = (0..v.len())
                .map(|i| {
                    let a = &pts[v[i]];
                    let b = &pts[v[(i + 1) % v.len()]];
                    let n = vec![b[1].clone() - a[1].clone(), a[0].clone() - b[0].clone()];
                    let c = dot(&n, a);
                    (n, c)
                })
                .collect();
            HullResult { vertices: v, facets, affine_dim: 2 }
        }
        3 => hull_3d(pts),
        _ => panic!("hull supports dimensions 1..=3"),
    }
}

/// Projects points of a plane with normal `n` to 2D by dropping the axis of the
/// largest normal component (injective on the plane).
pub fn drop_axis<T: HullScalar>(n: &[T]) -> usize {
    (0..3).max_by(|&i, &j| n[i].abs().cmp(&n[j].abs()).then(j.cmp(&i))).expect("three axes")
}

pub fn project<T: HullScalar>(p: &[T], drop: usize) -> Vec<T> {
    (0..3).filter(|&k| k != drop).map(|k| p[k].clone()).collect()
}

fn hull_3d<T: HullScalar>(pts: &[Vec<T>]) -> HullResult<T> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| pts[i].cmp(&pts[j]));
    order.dedup_by(|i, j| pts[*i] == pts[*j]);

    let i0 = order[0];
    let Some(i1) = order.iter().copied().find(|&i| pts[i] != pts[i0]) else {
        return HullResult { vertices: vec![i0], facets: Vec::new(), affine_dim: 0 };
    };
    let d01 = sub(&pts[i1], &pts[i0]);
    let Some(i2) = order
        .iter()
        .copied()
        .find(|&i| cross(&d01, &sub(&pts[i], &pts[i0])).iter().any(|x| !x.is_zero()))
    else {
        let v = lex_extremes(pts);
        return HullResult { vertices: v, facets: Vec::new(), affine_dim: 1 };
    };
    let Some(i3) = order.iter().copied().find(|&i| !orient3(&pts[i0], &pts[i1], &pts[i2], &pts[i]).is_zero()) else {
        // Planar: hull in a coordinate projection.
        let n = cross(&d01, &sub(&pts[i2], &pts[i0]));
        let drop = drop_axis(&n);
        let proj: Vec<Vec<T>> = pts.iter().map(|p| project(p, drop)).collect();
        let mut v = hull_2d(&proj);
        v.sort_by(|&i, &j| pts[i].cmp(&pts[j]));
        return HullResult { vertices: v, facets: Vec::new(), affine_dim: 2 };
    };

    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let add_face = |f: [usize; 3], faces: &mut Vec<[usize; 3]>, alive: &mut Vec<bool>, edges: &mut HashMap<(usize, usize), usize>| {
        let id = faces.len();
        faces.push(f);
        alive.push(true);
        for k in 0..3 {
            edges.insert((f[k], f[(k + 1) % 3]), id);
        }
    };
    let tet = [i0, i1, i2, i3];
    for skip in 0..4 {
        let mut f: Vec<usize> = tet.iter().copied().filter(|&x| x != tet[skip]).collect();
        if orient3(&pts[f[0]], &pts[f[1]], &pts[f[2]], &pts[tet[skip]]).is_positive() {
            f.swap(1, 2);
        }
        add_face([f[0], f[1], f[2]], &mut faces, &mut alive, &mut edges);
    }

    for &pi in &order {
        if tet.contains(&pi) {
            continue;
        }
        let p = &pts[pi];
        let visible: Vec<usize> = (0..faces.len())
            .filter(|&f| alive[f] && orient3(&pts[faces[f][0]], &pts[faces[f][1]], &pts[faces[f][2]], p).is_positive())
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut horizon = Vec::new();
        for &f in &visible {
            alive[f] = false;
        }
        for &f in &visible {
            let fv = faces[f];
            for k in 0..3 {
                let (a, b) = (fv[k], fv[(k + 1) % 3]);
                let twin = edges[&(b, a)];
                if alive[twin] {
                    horizon.push((a, b));
                }
            }
        }
        for &f in &visible {
            let fv = faces[f];
            for k in 0..3 {
                edges.remove(&(fv[k], fv[(k + 1) % 3]));
            }
        }
        for (a, b) in horizon {
            add_face([a, b, pi], &mut faces, &mut alive, &mut edges);
        }
    }

    // Group surviving triangles by plane; a point is extreme when its incident
    // planes have linearly independent normals.
    let mut planes: Vec<(Vec<T>, T)> = Vec::new();
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (f, fv) in faces.iter().enumerate() {
        if !alive[f] {
            continue;
        }
        let n = cross(&sub(&pts[fv[1]], &pts[fv[0]]), &sub(&pts[fv[2]], &pts[fv[0]]));
        let c = dot(&n, &pts[fv[0]]);
        let pid = match planes.iter().position(|(m, e)| same_plane(m, e, &n, &c)) {
            Some(i) => i,
            None => {
                planes.push((n, c));
                planes.len() - 1
            }
        };
        for &v in fv {
            let list = incident.entry(v).or_default();
            if !list.contains(&pid) {
                list.push(pid);
            }
        }
    }
    let mut vertices: Vec<usize> = incident
        .iter()
        .filter(|(_, ps)| rank_at_least_3(ps.iter().map(|&i| &planes[i].0)))
        .map(|(&v, _)| v)
        .collect();
    vertices.sort_by(|&i, &j| pts[i].cmp(&pts[j]));
    HullResult { vertices, facets: planes, affine_dim: 3 }
}

/// Same oriented plane: parallel normals pointing the same way and equal offsets after scaling.
fn same_plane<T: HullScalar>(m: &[T], e: &T, n: &[T], c: &T) -> bool {
    if cross(m, n).iter().any(|x| !x.is_zero()) || !dot(m, n).is_positive() {
        return false;
    }
    // m = λ n with λ > 0: compare e·|n|² with c·(m·n).
    e.clone() * dot(n, n) == c.clone() * dot(m, n)
}

fn rank_at_least_3<'a, T: HullScalar + 'a>(normals: impl Iterator<Item = &'a Vec<T>>) -> bool {
    let ns: Vec<&Vec<T>> = normals.collect();
    for i in 0..ns.len() {
        for j in i + 1..ns.len() {
            let c = cross(ns[i], ns[j]);
            if c.iter().all(|x| x.is_zero()) {
                continue;
            }
            for k in j + 1..ns.len() {
                if !dot(&c, ns[k]).is_zero() {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(v: &[(i128, i128)]) -> Vec<Vec<i128>> {
        v.iter().map(|&(x, y)| vec![x, y]).collect()
    }

    #[test]
    fn square_with_interior_and_edge_points() {
        let pts = p2(&[(0, 0), (2, 0), (1, 0), (2, 2), (0, 2), (1, 1), (0, 1)]);
        let h = hull(2, &pts);
        let v: Vec<_> = h.vertices.iter().map(|&i| pts[i].clone()).collect();
        assert_eq!(v, p2(&[(0, 0), (2, 0), (2, 2), (0, 2)]));
        assert_eq!(h.facets.len(), 4);
    }

    #[test]
    fn collinear_2d() {
        let pts = p2(&[(0, 0), (1, 1), (3, 3), (2, 2)]);
        let h = hull(2, &pts);
        assert_eq!(h.affine_dim, 1);
        assert_eq!(h.vertices.len(), 2);
    }

    #[test]
    fn cube_corners_and_face_centers() {
        let mut pts = Vec::new();
        for x in 0..3i128 {
            for y in 0..3i128 {
                for z in 0..3i128 {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        let h = hull(3, &pts);
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        for (n, c) in &h.facets {
            for p in &pts {
                assert!(dot(n, p) <= *c);
            }
        }
    }

    #[test]
    fn planar_3d_input() {
        let pts: Vec<Vec<i128>> = vec![vec![0, 0, 1], vec![2, 0, 1], vec![0, 2, 1], vec![1, 1, 1], vec![2, 2, 1]];
        let h = hull(3, &pts);
        assert_eq!(h.affine_dim, 2);
        assert_eq!(h.vertices.len(), 4);
    }

    #[test]
    fn rational_scalars() {
        use crate::rational::rat;
        let pts = vec![vec![rat(0, 1), rat(0, 1)], vec![rat(1, 2), rat(0, 1)], vec![rat(0, 1), rat(1, 3)], vec![rat(1, 8), rat(1, 8)]];
        assert_eq!(hull(2, &pts).vertices, vec![0, 1, 2]);
    }
}
