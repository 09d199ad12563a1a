//! The recursive density-controlled subdivision behind the linear stability bound.
//!
//! Start from a triangulation of `co(A)`. A simplex where `A` is sparse (density
//! at most `1 - ε`) is set aside; a dense one is split at a central point of `A`;
//! full and tiny simplices stop. Sums over the two families are tracked exactly.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::cell::{CellSet, Weight};
use crate::geom::measure::{CellClass, CellClassifier};
use crate::geom::polytope::{convex_hull, Polytope, Simplex};
use crate::partition::central::{central_point, subdivide_simplex, CentralPoint};
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    /// Dense and subdivided, or dense at the depth limit.
    Active,
    LowDensity,
    Full,
    SmallRadius,
}

impl Category {
    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Active => "active",
            Category::LowDensity => "low_density",
            Category::Full => "full",
            Category::SmallRadius => "small_radius",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionNode {
    pub id: usize,
    pub depth: usize,
    pub parent: Option<usize>,
    pub simplex: Simplex,
    pub measure_in_a: Rational,
    pub simplex_volume: Rational,
    pub category: Category,
    pub children: Vec<usize>,
    /// The point the node was split at.
    pub split: Option<CentralPoint>,
    /// Why a dense node could not be split.
    pub failure: Option<String>,
}

impl PartitionNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct PartitionOptions {
    pub max_depth: usize,
    /// Simplices with squared diameter at most this stop; defaults to a squared cell diagonal.
    pub min_diameter_sq: Option<Rational>,
    /// Use this simplex instead of a triangulation of `co(A)`; `A` is then cut to it.
    pub root: Option<Simplex>,
}

impl PartitionOptions {
    pub fn with_depth(max_depth: usize) -> Self {
        PartitionOptions { max_depth, min_diameter_sq: None, root: None }
    }
}

/// Result of [`linear_partition_process`]; nodes are stored in preorder.
#[derive(Debug, Clone)]
pub struct PartitionTree {
    pub nodes: Vec<PartitionNode>,
    pub roots: Vec<usize>,
    pub t: Weight,
    pub eps: Rational,
    /// Total volume of the root simplices.
    pub root_volume: Rational,
    /// `Σ |S'|` over low-density leaves.
    pub sparse_volume: Rational,
    /// `Σ |S' \ A|` over the remaining leaves.
    pub dense_gap: Rational,
}

impl PartitionTree {
    pub fn leaves(&self) -> impl Iterator<Item = &PartitionNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn leaf_volume(&self) -> Rational {
        self.leaves().map(|n| n.simplex_volume.clone()).sum()
    }

    /// Every split child keeps `1/(n+2)` of its parent and the vertex distances contract.
    pub fn splits_ok(&self) -> bool {
        self.nodes.iter().all(|n| n.split.as_ref().is_none_or(|cp| cp.ratios_ok(n.simplex.dim()) && cp.contraction_ok(&n.simplex)))
    }

    /// Children volumes sum to their parent everywhere.
    pub fn conserves_volume(&self) -> bool {
        self.nodes.iter().filter(|n| !n.is_leaf()).all(|n| {
            n.children.iter().map(|&c| self.nodes[c].simplex_volume.clone()).sum::<Rational>() == n.simplex_volume
        })
    }

    fn vertices_str(s: &Simplex) -> String {
        s.vertices()
            .iter()
            .map(|v| v.iter().map(format_rational).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Indented plain-text dump, one node per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let _ = write!(
                out,
                "{}#{} {} measure={} volume={} [{}]",
                "  ".repeat(n.depth),
                n.id,
                n.category.as_str(),
                format_rational(&n.measure_in_a),
                format_rational(&n.simplex_volume),
                Self::vertices_str(&n.simplex)
            );
            if let Some(f) = &n.failure {
                let _ = write!(out, " failure={f:?}");
            }
            out.push('\n');
        }
        out
    }

    /// CSV of leaves: node_id, depth, category, simplex vertices, measure, simplex_volume.
    pub fn leaves_csv(&self) -> String {
        let mut out = String::from("node_id,depth,category,vertices,measure,simplex_volume\n");
        for n in self.leaves() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                n.id,
                n.depth,
                n.category.as_str(),
                Self::vertices_str(&n.simplex),
                format_rational(&n.measure_in_a),
                format_rational(&n.simplex_volume)
            );
        }
        out
    }
}

struct Built {
    simplex: Simplex,
    measure: Rational,
    volume: Rational,
    category: Category,
    split: Option<CentralPoint>,
    failure: Option<String>,
    children: Vec<Built>,
}

struct Params {
    eps: Rational,
    alpha: Rational,
    max_depth: usize,
    min_diam_sq: Rational,
}

/// Cells of `a` meeting the simplex, and the exact measure of `a` inside it.
fn restrict(a: &CellSet, s: &Simplex) -> (CellSet, Rational) {
    let p: Polytope = s.to_polytope();
    let cls = CellClassifier::new(a.dim(), a.pitch(), p.facets());
    let mut kept = Vec::new();
    let mut frac = Rational::zero();
    let mut whole = 0i64;
    for c in a.cells() {
        match cls.classify(c) {
            CellClass::Outside => {}
            CellClass::Inside => {
                whole += 1;
                kept.push(*c);
            }
            CellClass::Cut => {
                let f = cls.fraction(c);
                if !f.is_zero() {
                    frac += f;
                    kept.push(*c);
                }
            }
        }
    }
    let measure = (frac + Rational::from_integer(whole.into())) * a.grid().cell_volume();
    (CellSet::new(a.grid().clone(), kept), measure)
}

fn build(a: &CellSet, s: Simplex, depth: usize, p: &Params) -> Built {
    let (local, measure) = restrict(a, &s);
    let volume = s.volume();
    let mut node = Built { simplex: s, measure, volume, category: Category::Active, split: None, failure: None, children: Vec::new() };
    if node.measure == node.volume {
        node.category = Category::Full;
        return node;
    }
    if node.measure <= (Rational::one() - &p.eps) * &node.volume {
        node.category = Category::LowDensity;
        return node;
    }
    if node.simplex.max_edge_sq() <= p.min_diam_sq {
        node.category = Category::SmallRadius;
        return node;
    }
    if depth >= p.max_depth {
        return node;
    }
    match central_point(&local, &node.simplex, &p.alpha) {
        Err(e) => node.failure = Some(e.to_string()),
        Ok(cp) => match subdivide_simplex(&node.simplex, &cp.x) {
            Err(e) => node.failure = Some(e.to_string()),
            Ok(kids) => {
                node.children = kids.into_par_iter().map(|k| build(&local, k, depth + 1, p)).collect();
                node.split = Some(cp);
            }
        },
    }
    node
}

fn flatten(b: Built, depth: usize, parent: Option<usize>, out: &mut Vec<PartitionNode>) -> usize {
    let id = out.len();
    out.push(PartitionNode {
        id,
        depth,
        parent,
        simplex: b.simplex,
        measure_in_a: b.measure,
        simplex_volume: b.volume,
        category: b.category,
        children: Vec::new(),
        split: b.split,
        failure: b.failure,
    });
    let kids: Vec<usize> = b.children.into_iter().map(|c| flatten(c, depth + 1, Some(id), out)).collect();
    out[id].children = kids;
    id
}

/// Runs the partition process on `A` with density parameter `eps ∈ (0,1)`.
///
/// `t` is carried into the result for the caller's bookkeeping; the thresholds
/// depend on `eps` only.
pub fn linear_partition_process(a: &CellSet, t: &Weight, eps: &Rational, opts: &PartitionOptions) -> Result<PartitionTree> {
    if *eps <= Rational::zero() || *eps >= Rational::one() {
        return Err(Error::Invalid(format!("eps must lie in (0,1), got {eps}")));
    }
    let roots: Vec<Simplex> = match &opts.root {
        Some(s) => vec![s.clone()],
        None => {
            let hull = convex_hull(a)?;
            if hull.is_degenerate() {
                return Err(Error::Degenerate("co(A) is not full-dimensional".into()));
            }
            hull.fan_triangulation()
        }
    };
    let params = Params {
        alpha: eps / (Rational::one() - eps),
        eps: eps.clone(),
        max_depth: opts.max_depth,
        min_diam_sq: opts.min_diameter_sq.clone().unwrap_or_else(|| a.pitch() * a.pitch() * Rational::from_integer((a.dim() as i64).into())),
    };
    let built: Vec<Built> = roots.into_par_iter().map(|s| build(a, s, 0, &params)).collect();
    let mut nodes = Vec::new();
    let root_ids = built.into_iter().map(|b| flatten(b, 0, None, &mut nodes)).collect();
    let root_volume = nodes.iter().filter(|n| n.parent.is_none()).map(|n| n.simplex_volume.clone()).sum();
    let mut sparse_volume = Rational::zero();
    let mut dense_gap = Rational::zero();
    for n in nodes.iter().filter(|n| n.is_leaf()) {
        if n.category == Category::LowDensity {
            sparse_volume += &n.simplex_volume;
        } else {
            dense_gap += &n.simplex_volume - &n.measure_in_a;
        }
    }
    Ok(PartitionTree { nodes, roots: root_ids, t: t.clone(), eps: eps.clone(), root_volume, sparse_volume, dense_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::cell::GridSpec;
    use crate::rational::{int, ipoint, rat};

    fn half() -> Weight {
        Weight::from_ratio(1, 2).unwrap()
    }

    #[test]
    fn full_simplex_has_no_gap() {
        // A block of cells is its own hull, so both root triangles are full.
        let g = GridSpec::new(2, rat(1, 4)).unwrap();
        let a = CellSet::block(g, &[0, 0], &[8, 8]);
        let tree = linear_partition_process(&a, &half(), &rat(1, 10), &PartitionOptions::with_depth(3)).unwrap();
        assert!(tree.nodes.iter().all(|n| n.category == Category::Full));
        assert_eq!(tree.dense_gap, int(0));
        assert_eq!(tree.leaf_volume(), int(4));
    }

    #[test]
    fn notched_triangle_conserves_volume() {
        let g = GridSpec::new(2, rat(1, 16)).unwrap();
        let a = CellSet::block(g, &[0, 0], &[32, 32]).filter(|c| c[0] + c[1] < 32 && !(c[0] < 8 && c[1] < 8));
        let tree = linear_partition_process(&a, &half(), &rat(1, 5), &PartitionOptions::with_depth(4)).unwrap();
        assert_eq!(tree.leaf_volume(), convex_hull(&a).unwrap().volume());
        assert!(tree.leaves().any(|n| n.category == Category::LowDensity));
        assert!(tree.conserves_volume() && tree.splits_ok());
    }

    #[test]
    fn depth_zero_is_roots_only() {
        let g = GridSpec::new(2, rat(1, 8)).unwrap();
        let a = CellSet::block(g, &[0, 0], &[8, 8]).filter(|c| c[0] + c[1] < 12);
        let root = Simplex::new(vec![ipoint(&[0, 0]), ipoint(&[2, 0]), ipoint(&[0, 2])]).unwrap();
        let opts = PartitionOptions { max_depth: 0, min_diameter_sq: None, root: Some(root) };
        let tree = linear_partition_process(&a, &half(), &rat(1, 10), &opts).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert_eq!(tree.nodes[0].category, Category::LowDensity);
        assert!(tree.dump().starts_with("#0 low_density"));
        assert_eq!(tree.leaves_csv().lines().count(), 2);
    }
}
