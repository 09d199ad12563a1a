use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Point, Rational};

/// Integer cell coordinates, zero-padded past the grid dimension.
pub type Cell = [i64; 3];

/// A cubic lattice of side `pitch` in dimension 1, 2 or 3.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub dim: usize,
    pub pitch: Rational,
}

impl GridSpec {
    pub fn new(dim: usize, pitch: Rational) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension { dim });
        }
        if !pitch.is_positive() {
            return Err(Error::Invalid(format!("pitch must be positive, got {pitch}")));
        }
        Ok(GridSpec { dim, pitch })
    }

    pub fn unit(dim: usize) -> Self {
        Self::new(dim, Rational::one()).expect("unit grid")
    }

    pub fn cell_volume(&self) -> Rational {
        pow(&self.pitch, self.dim)
    }

    /// The grid with `factor` times smaller cells.
    pub fn refined(&self, factor: u64) -> GridSpec {
        GridSpec { dim: self.dim, pitch: &self.pitch / Rational::from_integer(BigInt::from(factor)) }
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "dim {} pitch {} vs dim {} pitch {}",
                self.dim, self.pitch, other.dim, other.pitch
            )));
        }
        Ok(())
    }
}

pub(crate) fn pow(r: &Rational, k: usize) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * r)
}

/// Interpolation weight `t = p/q` with `0 < t < 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weight {
    t: Rational,
}

impl Weight {
    pub fn new(t: Rational) -> Result<Self> {
        if !t.is_positive() || t >= Rational::one() {
            return Err(Error::InvalidWeight(t.to_string()));
        }
        if t.denom().to_i64().is_none() {
            return Err(Error::InvalidWeight(format!("{t} (denominator too large)")));
        }
        Ok(Weight { t })
    }

    pub fn from_ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidWeight(format!("{p}/{q}")));
        }
        Self::new(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    pub fn one_minus(&self) -> Rational {
        Rational::one() - &self.t
    }

    pub fn p(&self) -> i64 {
        self.t.numer().to_i64().expect("numerator below denominator")
    }

    pub fn q(&self) -> i64 {
        self.t.denom().to_i64().expect("checked at construction")
    }
}

/// A simple set: a finite union of closed lattice cubes `h*c + [0,h]^dim`.
///
/// Cells are kept sorted lexicographically and without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellSet {
    grid: GridSpec,
    cells: Vec<Cell>,
}

/// A maximal run of consecutive cells along the last axis: `lo..hi` (hi exclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub lo: i64,
    pub hi: i64,
}

/// Cells grouped by their leading coordinates, as runs along the last axis.
#[derive(Debug, Clone)]
pub struct Line {
    pub key: [i64; 2],
    pub runs: Vec<Run>,
}

impl CellSet {
    pub fn new(grid: GridSpec, cells: impl IntoIterator<Item = Cell>) -> Self {
        let dim = grid.dim;
        let mut cells: Vec<Cell> = cells
            .into_iter()
            .map(|mut c| {
                for x in c.iter_mut().skip(dim) {
                    *x = 0;
                }
                c
            })
            .collect();
        cells.sort_unstable();
        cells.dedup();
        CellSet { grid, cells }
    }

    pub fn empty(grid: GridSpec) -> Self {
        CellSet { grid, cells: Vec::new() }
    }

    /// Builds from already sorted, deduplicated cells.
    pub(crate) fn from_sorted(grid: GridSpec, cells: Vec<Cell>) -> Self {
        debug_assert!(cells.windows(2).all(|w| w[0] < w[1]));
        CellSet { grid, cells }
    }

    /// All cells `c` with `lo[i] <= c[i] < hi[i]` on the first `dim` axes.
    pub fn block(grid: GridSpec, lo: &[i64], hi: &[i64]) -> Self {
        let d = grid.dim;
        let mut lo3 = [0i64; 3];
        let mut hi3 = [1i64; 3];
        lo3[..d].copy_from_slice(&lo[..d]);
        hi3[..d].copy_from_slice(&hi[..d]);
        let mut cells = Vec::new();
        for x in lo3[0]..hi3[0] {
            for y in lo3[1]..hi3[1] {
                for z in lo3[2]..hi3[2] {
                    cells.push([x, y, z]);
                }
            }
        }
        CellSet { grid, cells }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn pitch(&self) -> &Rational {
        &self.grid.pitch
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: &Cell) -> bool {
        self.cells.binary_search(c).is_ok()
    }

    /// `|cells| * pitch^dim`, exactly.
    pub fn volume(&self) -> Rational {
        self.grid.cell_volume() * Rational::from_integer(BigInt::from(self.cells.len()))
    }

    pub fn translate(&self, z: &[i64]) -> CellSet {
        let mut off = [0i64; 3];
        off[..self.dim()].copy_from_slice(&z[..self.dim()]);
        let cells = self.cells.iter().map(|c| [c[0] + off[0], c[1] + off[1], c[2] + off[2]]).collect();
        CellSet { grid: self.grid.clone(), cells }
    }

    pub fn map_cells(&self, f: impl Fn(Cell) -> Cell) -> CellSet {
        CellSet::new(self.grid.clone(), self.cells.iter().map(|&c| f(c)))
    }

    pub fn filter(&self, f: impl Fn(&Cell) -> bool) -> CellSet {
        CellSet { grid: self.grid.clone(), cells: self.cells.iter().copied().filter(|c| f(c)).collect() }
    }

    pub fn union(&self, other: &CellSet) -> Result<CellSet> {
        self.grid.check_same(&other.grid)?;
        let mut cells = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < other.len() {
            let take_a = j == other.len() || (i < self.len() && self.cells[i] <= other.cells[j]);
            if take_a {
                if j < other.len() && self.cells[i] == other.cells[j] {
                    j += 1;
                }
                cells.push(self.cells[i]);
                i += 1;
            } else {
                cells.push(other.cells[j]);
                j += 1;
            }
        }
        Ok(CellSet { grid: self.grid.clone(), cells })
    }

    pub fn intersection(&self, other: &CellSet) -> Result<CellSet> {
        self.grid.check_same(&other.grid)?;
        Ok(self.filter(|c| other.contains(c)))
    }

    pub fn difference(&self, other: &CellSet) -> Result<CellSet> {
        self.grid.check_same(&other.grid)?;
        Ok(self.filter(|c| !other.contains(c)))
    }

    /// Per-axis `(min, max)` cell coordinates; `None` when empty.
    pub fn bounds(&self) -> Option<([i64; 3], [i64; 3])> {
        let first = *self.cells.first()?;
        let (mut lo, mut hi) = (first, first);
        for c in &self.cells {
            for k in 0..3 {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
        }
        Some((lo, hi))
    }

    /// Lower corner `h*c` of a cell.
    pub fn corner(&self, c: &Cell) -> Point {
        c[..self.dim()].iter().map(|&x| int(x) * &self.grid.pitch).collect()
    }

    /// Center `h*(c + 1/2)` of a cell.
    pub fn center(&self, c: &Cell) -> Point {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        c[..self.dim()].iter().map(|&x| (int(x) + &half) * &self.grid.pitch).collect()
    }

    /// Re-expresses the set on the grid of pitch `h/factor`.
    pub fn refine(&self, factor: u64) -> CellSet {
        let f = factor as i64;
        let d = self.dim();
        let mut cells = Vec::with_capacity(self.len() * (factor as usize).pow(d as u32));
        let span = |k: usize| if k < d { f } else { 1 };
        for c in &self.cells {
            for x in 0..span(0) {
                for y in 0..span(1) {
                    for z in 0..span(2) {
                        let mut r = [c[0] * f + x, c[1] * f + y, c[2] * f + z];
                        for v in r.iter_mut().skip(d) {
                            *v = 0;
                        }
                        cells.push(r);
                    }
                }
            }
        }
        CellSet::new(self.grid.refined(factor), cells)
    }

    /// Coarsens by `factor` if every coarse cell is either full or empty.
    pub fn coarsen(&self, factor: u64) -> Option<CellSet> {
        let f = factor as i64;
        let d = self.dim();
        let block = (factor as usize).pow(d as u32);
        let mut counts: BTreeMap<Cell, usize> = BTreeMap::new();
        for c in &self.cells {
            let mut k = [0i64; 3];
            for i in 0..d {
                k[i] = c[i].div_euclid(f);
            }
            *counts.entry(k).or_default() += 1;
        }
        if counts.values().any(|&n| n != block) {
            return None;
        }
        let pitch = &self.grid.pitch * Rational::from_integer(BigInt::from(factor));
        let grid = GridSpec { dim: d, pitch };
        Some(CellSet { grid, cells: counts.into_keys().collect() })
    }

    /// Coarsens as far as possible by powers of each prime factor of the
    /// pitch's denominator, so chained refinements do not accumulate.
    pub fn canonicalize(&self) -> CellSet {
        let mut cur = self.clone();
        let mut den = cur.grid.pitch.denom().clone();
        let mut p = BigInt::from(2);
        while den > BigInt::one() {
            if (&den % &p).is_zero() {
                let f = p.to_u64().unwrap_or(0);
                if f == 0 {
                    break;
                }
                match cur.coarsen(f) {
                    Some(c) => {
                        cur = c;
                        den /= &p;
                        continue;
                    }
                    None => {
                        while (&den % &p).is_zero() {
                            den /= &p;
                        }
                    }
                }
            }
            p += 1;
        }
        cur
    }

    /// Groups the cells into lines along the last axis.
    pub fn lines(&self) -> Vec<Line> {
        let d = self.dim();
        let key_of = |c: &Cell| match d {
            1 => [0, 0],
            2 => [c[0], 0],
            _ => [c[0], c[1]],
        };
        let mut out: Vec<Line> = Vec::new();
        for c in &self.cells {
            let key = key_of(c);
            let x = c[d - 1];
            match out.last_mut() {
                Some(line) if line.key == key => {
                    let last = line.runs.last_mut().expect("lines are never empty");
                    if last.hi == x {
                        last.hi += 1;
                    } else {
                        line.runs.push(Run { lo: x, hi: x + 1 });
                    }
                }
                _ => out.push(Line { key, runs: vec![Run { lo: x, hi: x + 1 }] }),
            }
        }
        out
    }
}

/// Rebuilds a cell from a line key and a last-axis coordinate.
pub(crate) fn cell_from_line(dim: usize, key: [i64; 2], x: i64) -> Cell {
    match dim {
        1 => [x, 0, 0],
        2 => [key[0], x, 0],
        _ => [key[0], key[1], x],
    }
}
