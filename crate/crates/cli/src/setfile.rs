//! Plain-text cell sets: a header line `dim pitch_num pitch_den`, then one cell
//! per line as `dim` integers. `#` starts a comment; blank lines are skipped.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use bmlab_core::rational::rat;
use bmlab_core::{CellSet, GridSpec};

use crate::error::{CliError, CliResult};

fn fields(line: &str) -> Vec<&str> {
    line.split('#').next().unwrap_or("").split_whitespace().collect()
}

fn int(tok: &str, line: usize) -> CliResult<i64> {
    tok.parse().map_err(|_| CliError::Malformed { line, msg: format!("expected an integer, found {tok:?}") })
}

pub fn parse_set(text: &str) -> CliResult<CellSet> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, fields(l))).filter(|(_, f)| !f.is_empty());
    let (hl, header) = lines.next().ok_or(CliError::Malformed { line: 1, msg: "missing header".into() })?;
    if header.len() != 3 {
        return Err(CliError::Malformed { line: hl, msg: "header must be `dim pitch_num pitch_den`".into() });
    }
    let dim = int(header[0], hl)?;
    let (num, den) = (int(header[1], hl)?, int(header[2], hl)?);
    if !(1..=3).contains(&dim) || num <= 0 || den <= 0 {
        return Err(CliError::Malformed { line: hl, msg: "need 1 <= dim <= 3 and a positive pitch".into() });
    }
    let dim = dim as usize;
    let grid = GridSpec::new(dim, rat(num, den))?;
    let mut seen = BTreeSet::new();
    for (line, f) in lines {
        if f.len() != dim {
            return Err(CliError::Malformed { line, msg: format!("expected {dim} coordinates, found {}", f.len()) });
        }
        let mut c = [0i64; 3];
        for (k, tok) in f.iter().enumerate() {
            c[k] = int(tok, line)?;
        }
        if !seen.insert(c) {
            return Err(CliError::DuplicateCell { line, cell: f.join(" ") });
        }
    }
    Ok(CellSet::new(grid, seen))
}

pub fn parse_set_file(path: &Path) -> CliResult<CellSet> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_set(&text).map_err(|e| match e {
        CliError::Malformed { line, msg } => CliError::Malformed { line, msg: format!("{}: {msg}", path.display()) },
        other => other,
    })
}

/// Canonical text form: header, then cells in lexicographic order.
pub fn write_set(s: &CellSet) -> String {
    let p = s.pitch();
    let mut out = format!("{} {} {}\n", s.dim(), p.numer(), p.denom());
    for c in s.cells() {
        let coords: Vec<String> = c[..s.dim()].iter().map(i64::to_string).collect();
        let _ = writeln!(out, "{}", coords.join(" "));
    }
    out
}

pub fn write_set_file(path: &Path, s: &CellSet) -> CliResult<()> {
    std::fs::write(path, write_set(s)).map_err(|e| CliError::io(path, e))
}
