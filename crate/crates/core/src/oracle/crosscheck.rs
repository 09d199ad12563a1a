//! Kernel versus oracle comparison on one instance.

use std::fmt::Write as _;

use crate::error::Result;
use crate::geom::cell::{CellSet, Weight};
use crate::geom::measure::region_measure;
use crate::geom::minkowski::minkowski_combine;
use crate::geom::polytope::{convex_hull, Simplex};
use crate::rational::{format_rational, Point, Rational};

use super::bracket::region_bracket;
use super::brute_hull::brute_hull_volume;
use super::sweep::{minkowski_direct_boxes, sweep_union_volume, DEFAULT_PAIR_CAP};

/// Subsampling factor per axis for region brackets.
pub const BRACKET_SUBDIVISIONS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossRow {
    pub quantity: String,
    pub kernel: String,
    pub oracle: String,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub instance_id: String,
    pub rows: Vec<CrossRow>,
}

impl CrosscheckReport {
    pub fn verdict(&self) -> Verdict {
        if self.rows.iter().all(|r| r.equal) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub const CSV_HEADER: &'static str = "instance_id,quantity,kernel_value,oracle_value,equal";

    /// Rows without header.
    pub fn csv_rows(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{}", self.instance_id, r.quantity, r.kernel, r.oracle, r.equal as u8);
        }
        s
    }
}

fn show(r: &Result<Rational>) -> String {
    match r {
        Ok(x) => format_rational(x),
        Err(e) => format!("error: {e}").replace(',', ";"),
    }
}

fn exact_row(quantity: &str, kernel: Result<Rational>, oracle: Result<Rational>) -> CrossRow {
    let equal = matches!((&kernel, &oracle), (Ok(k), Ok(o)) if k == o);
    CrossRow { quantity: quantity.into(), kernel: show(&kernel), oracle: show(&oracle), equal }
}

/// A simplex over the lower corner of the set's bounding box, offset by a
/// third of a cell so its facets cut cells.
pub fn probe_simplex(s: &CellSet) -> Option<Vec<Point>> {
    let (lo, hi) = s.bounds()?;
    let d = s.dim();
    let h = s.pitch();
    let third = h / Rational::from_integer(3.into());
    let v0: Point = (0..d).map(|k| h * Rational::from_integer(lo[k].into()) + &third).collect();
    let mut vs = vec![v0.clone()];
    for k in 0..d {
        let mut v = v0.clone();
        v[k] += h * Rational::from_integer((hi[k] - lo[k] + 1).into());
        vs.push(v);
    }
    Some(vs)
}

fn bracket_row(quantity: &str, s: &CellSet) -> Option<CrossRow> {
    let vs = probe_simplex(s)?;
    let kernel = Simplex::new(vs.clone()).and_then(|sx| region_measure(s, &sx.to_polytope()));
    let oracle = region_bracket(s, &vs, BRACKET_SUBDIVISIONS);
    let equal = matches!((&kernel, &oracle), (Ok(k), Ok((lo, hi))) if lo <= k && k <= hi);
    let oracle = match oracle {
        Ok((lo, hi)) => format!("[{} {}]", format_rational(&lo), format_rational(&hi)),
        Err(e) => format!("error: {e}").replace(',', ";"),
    };
    Some(CrossRow { quantity: quantity.into(), kernel: show(&kernel), oracle, equal })
}

/// Compare Minkowski volume, both hull volumes and both region measures.
pub fn crosscheck_instance(id: &str, a: &CellSet, b: &CellSet, t: &Weight) -> CrosscheckReport {
    crosscheck_with(id, a, b, t, minkowski_combine)
}

/// As [`crosscheck_instance`] with the kernel's combination replaced, so a
/// faulty kernel can be fed in as a negative control.
pub fn crosscheck_with<F>(id: &str, a: &CellSet, b: &CellSet, t: &Weight, combine: F) -> CrosscheckReport
where
    F: Fn(&CellSet, &CellSet, &Weight) -> Result<CellSet>,
{
    let mut rows = Vec::new();
    let kernel = combine(a, b, t).map(|d| d.volume());
    let oracle = minkowski_direct_boxes(a, b, t, DEFAULT_PAIR_CAP).and_then(|bl| sweep_union_volume(&bl));
    rows.push(exact_row("minkowski_volume", kernel, oracle));
    for (name, s) in [("hull_volume_a", a), ("hull_volume_b", b)] {
        rows.push(exact_row(name, convex_hull(s).map(|p| p.volume()), brute_hull_volume(s)));
    }
    for (name, s) in [("region_measure_a", a), ("region_measure_b", b)] {
        rows.extend(bracket_row(name, s));
    }
    CrosscheckReport { instance_id: id.into(), rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::cell::GridSpec;
    use crate::rational::rat;

    fn fixture() -> (CellSet, CellSet) {
        let g = GridSpec::new(2, rat(1, 4)).unwrap();
        let a = CellSet::new(g.clone(), [[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 0], [1, 1, 0], [0, 2, 0]]);
        let b = CellSet::new(g, [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [2, 1, 0], [3, 3, 0]]);
        (a, b)
    }

    #[test]
    fn agreeing_instance_passes() {
        let (a, b) = fixture();
        let rep = crosscheck_instance("fx", &a, &b, &Weight::from_ratio(1, 3).unwrap());
        assert_eq!(rep.verdict(), Verdict::Pass, "{}", rep.csv_rows());
        assert_eq!(rep.rows.len(), 5);
    }

    #[test]
    fn corrupted_kernel_fails() {
        let (a, b) = fixture();
        let drop_one = |x: &CellSet, y: &CellSet, t: &Weight| -> Result<CellSet> {
            let d = minkowski_combine(x, y, t)?;
            let first = d.cells()[0];
            Ok(d.filter(|c| *c != first))
        };
        let rep = crosscheck_with("bad", &a, &b, &Weight::from_ratio(1, 2).unwrap(), drop_one);
        assert_eq!(rep.verdict(), Verdict::Fail);
        assert!(rep.csv_rows().lines().next().unwrap().ends_with(",0"));
    }
}
