//! CSV and plot-data output for scenario runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bmlab_core::deficits::DeficitReport;
use bmlab_core::rational::to_f64;

use crate::error::{CliError, CliResult};

/// One instance: the deficit columns (absent for families without an
/// equal-volume pair) followed by the family's own columns.
#[derive(Debug, Clone)]
pub struct Row {
    pub id: String,
    pub dim: usize,
    pub report: Option<DeficitReport>,
    pub extra: Vec<String>,
    pub runtime_ms: Option<u128>,
    /// False when a check attached to this row failed.
    pub ok: bool,
}

impl Row {
    pub fn fields(&self) -> Vec<String> {
        match &self.report {
            Some(r) => r.csv_fields(&self.id, self.runtime_ms),
            None => {
                let mut f = vec![String::new(); DeficitReport::CSV_COLUMNS.len()];
                f[0] = self.id.clone();
                f[1] = self.dim.to_string();
                if let Some(ms) = self.runtime_ms {
                    f[DeficitReport::CSV_COLUMNS.len() - 1] = ms.to_string();
                }
                f
            }
        }
        .into_iter()
        .chain(self.extra.iter().cloned())
        .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub extra_columns: Vec<&'static str>,
    pub rows: Vec<Row>,
}

impl ScenarioOutput {
    pub fn header(&self) -> String {
        DeficitReport::CSV_COLUMNS.iter().chain(&self.extra_columns).copied().collect::<Vec<_>>().join(",")
    }

    pub fn failures(&self) -> Vec<&Row> {
        self.rows.iter().filter(|r| !r.ok).collect()
    }
}

pub fn render_csv(out: &ScenarioOutput) -> CliResult<String> {
    if out.rows.is_empty() {
        return Err(CliError::EmptyReport);
    }
    let mut s = out.header();
    s.push('\n');
    for r in &out.rows {
        s.push_str(&r.fields().join(","));
        s.push('\n');
    }
    Ok(s)
}

/// `ln δ` against `ln(symdiff_opt / |A|)`, one line per row where both are positive.
pub fn render_plot(out: &ScenarioOutput) -> String {
    let mut s = String::from("# ln_delta ln_symdiff_rel\n");
    for r in out.rows.iter().filter_map(|r| r.report.as_ref()) {
        let d = to_f64(&r.delta_t);
        let sd = to_f64(&(&r.symdiff_opt / &r.vol_a));
        if d > 0.0 && sd > 0.0 {
            let _ = writeln!(s, "{:.12e} {:.12e}", d.ln(), sd.ln());
        }
    }
    s
}

/// Companion of `out.csv` is `out.plot.dat`.
pub fn plot_path(csv: &Path) -> PathBuf {
    csv.with_extension("plot.dat")
}

/// Writes the CSV and its plot-data companion.
pub fn emit_report(out: &ScenarioOutput, path: &Path) -> CliResult<PathBuf> {
    let csv = render_csv(out)?;
    std::fs::write(path, csv).map_err(|e| CliError::io(path, e))?;
    let plot = plot_path(path);
    std::fs::write(&plot, render_plot(out)).map_err(|e| CliError::io(&plot, e))?;
    Ok(plot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_row() -> Row {
        Row { id: "b/0".into(), dim: 2, report: None, extra: vec!["x".into()], runtime_ms: None, ok: true }
    }

    #[test]
    fn header_and_one_line() {
        let out = ScenarioOutput { extra_columns: vec!["extra"], rows: vec![box_row()] };
        let csv = render_csv(&out).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("scenario_id,dim,t_num") && lines[0].ends_with("runtime_ms,extra"));
        assert_eq!(lines[1].split(',').count(), lines[0].split(',').count());
        assert!(lines[1].starts_with("b/0,2,"));
    }

    #[test]
    fn empty_rows_are_an_error() {
        let out = ScenarioOutput { extra_columns: vec![], rows: vec![] };
        assert!(matches!(render_csv(&out), Err(CliError::EmptyReport)));
    }
}
