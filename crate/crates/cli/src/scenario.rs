//! Built-in instance families and the scenario runner.

use std::path::PathBuf;
use std::time::Instant;

use bmlab_core::deficits::{box_hull_bound_check, common_hull_ratio, deficit_report, freiman_check_1d};
use bmlab_core::families::{instance_rng, intconvex_pair, perturbed_pair, perturbed_params, random_1d_pair, random_box_pair, sharp_pair};
use bmlab_core::rational::{format_rational, int, rat};
use bmlab_core::{GridSpec, Rational, Weight};
use num_traits::One;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::report::{Row, ScenarioOutput};

pub const FAMILIES: [&str; 5] = ["sharp-family", "freiman1d", "box-hull", "perturbed-convex", "intconvex"];

/// Redraws allowed per freiman1d instance before its parameters count as infeasible.
const MAX_REDRAWS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub dim: usize,
    /// `None` lets the family choose (freiman1d draws one per instance).
    pub t: Option<Weight>,
    pub pitch: Rational,
    /// Pitches of the sharp family.
    pub h_list: Vec<Rational>,
    pub trials: usize,
    pub seed: u64,
    /// Side of the sampling box, in cells, for intconvex.
    pub size: i64,
    pub output: Option<PathBuf>,
    pub timings: bool,
}

impl ScenarioSpec {
    /// Family defaults; fails on an unknown family name.
    pub fn new(name: &str, seed: u64) -> CliResult<ScenarioSpec> {
        let mut s = ScenarioSpec {
            name: name.to_string(),
            dim: 2,
            t: Some(Weight::from_ratio(1, 2)?),
            pitch: rat(1, 16),
            h_list: (1..=6).map(|k| rat(1, 1 << k)).collect(),
            trials: 10,
            seed,
            size: 40,
            output: None,
            timings: false,
        };
        match name {
            "sharp-family" | "intconvex" => {}
            "freiman1d" => {
                s.dim = 1;
                s.t = None;
                s.pitch = rat(1, 8);
            }
            "box-hull" => {
                s.t = None;
                s.pitch = rat(1, 12);
            }
            "perturbed-convex" => {
                s.trials = 24;
                s.pitch = rat(1, 256);
            }
            _ => return Err(CliError::UnknownFamily(name.to_string())),
        }
        Ok(s)
    }
}

fn unit_denominator(r: &Rational, what: &str) -> CliResult<i64> {
    let n: Option<i64> = if r.numer().is_one() { r.denom().try_into().ok() } else { None };
    n.ok_or_else(|| CliError::Infeasible(format!("{what} must be 1/n, got {}", format_rational(r))))
}

fn timed<T>(on: bool, f: impl FnOnce() -> CliResult<T>) -> CliResult<(T, Option<u128>)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, on.then(|| start.elapsed().as_millis())))
}

fn bit(b: bool) -> String {
    u8::from(b).to_string()
}

pub fn run_scenario(spec: &ScenarioSpec) -> CliResult<ScenarioOutput> {
    if !(1..=3).contains(&spec.dim) {
        return Err(CliError::Infeasible(format!("dim {} outside 1..=3", spec.dim)));
    }
    let name = spec.name.as_str();
    let id = |i: usize| format!("{name}/{i}");
    let (extra_columns, rows): (Vec<&'static str>, CliResult<Vec<Row>>) = match name {
        "sharp-family" => {
            if spec.dim < 2 {
                return Err(CliError::Infeasible("sharp-family needs dim >= 2".into()));
            }
            let t = spec.t.clone().expect("family default");
            let ns = spec.h_list.iter().map(|h| unit_denominator(h, "h")).collect::<CliResult<Vec<_>>>()?;
            let rows = ns
                .par_iter()
                .enumerate()
                .map(|(i, &n)| {
                    let (rep, ms) = timed(spec.timings, || {
                        let (a, b) = sharp_pair(spec.dim, n)?;
                        Ok(deficit_report(&a, &b, &t)?)
                    })?;
                    let h = rat(1, n);
                    let closed = t.t() * t.one_minus() * &h * &h / (Rational::one() + &h);
                    let matched = closed == rep.delta_t;
                    Ok(Row {
                        id: id(i),
                        dim: spec.dim,
                        extra: vec![format_rational(&h), format_rational(&closed), bit(matched)],
                        report: Some(rep),
                        runtime_ms: ms,
                        ok: matched,
                    })
                })
                .collect();
            (vec!["h", "delta_closed_form", "closed_form_match"], rows)
        }
        "freiman1d" => {
            let rows = (0..spec.trials)
                .into_par_iter()
                .map(|i| {
                    let ((rep, fr), ms) = timed(spec.timings, || {
                        let mut rng = instance_rng(spec.seed, i as u64);
                        for _ in 0..MAX_REDRAWS {
                            let (a, b, drawn) = random_1d_pair(&mut rng)?;
                            let t = spec.t.clone().unwrap_or(drawn);
                            let fr = freiman_check_1d(&a, &b, &t)?;
                            if fr.precondition {
                                return Ok((deficit_report(&a, &b, &t)?, fr));
                            }
                        }
                        Err(CliError::Infeasible(format!("no pair with delta_t < min(t, 1-t) in {MAX_REDRAWS} draws")))
                    })?;
                    let holds = fr.holds_a && fr.holds_b;
                    Ok(Row {
                        id: id(i),
                        dim: 1,
                        extra: vec![format_rational(&fr.bound_a), format_rational(&fr.bound_b), bit(holds)],
                        report: Some(rep),
                        runtime_ms: ms,
                        ok: holds,
                    })
                })
                .collect();
            (vec!["bound_a", "bound_b", "bound_holds"], rows)
        }
        "box-hull" => {
            let rows = (0..spec.trials)
                .into_par_iter()
                .map(|i| {
                    let ((d, rep), ms) = timed(spec.timings, || {
                        let (r, s) = random_box_pair(&mut instance_rng(spec.seed, i as u64))?;
                        Ok((r.lo.len(), box_hull_bound_check(&r, &s)?))
                    })?;
                    Ok(Row {
                        id: id(i),
                        dim: d,
                        extra: vec![format_rational(&rep.lhs), format_rational(&rep.rhs), bit(rep.holds)],
                        report: None,
                        runtime_ms: ms,
                        ok: rep.holds,
                    })
                })
                .collect();
            (vec!["hull_union", "bound_rhs", "bound_holds"], rows)
        }
        "perturbed-convex" => {
            let n = unit_denominator(&spec.pitch, "pitch")?;
            if n < 8 {
                return Err(CliError::Infeasible("perturbed-convex needs pitch at most 1/8".into()));
            }
            let t = spec.t.clone().expect("family default");
            let rows = (0..spec.trials)
                .into_par_iter()
                .map(|i| {
                    let ((rep, p), ms) = timed(spec.timings, || {
                        let p = perturbed_params(&mut instance_rng(spec.seed, i as u64), n);
                        let (a, b) = perturbed_pair(&p)?;
                        Ok((deficit_report(&a, &b, &t)?, p))
                    })?;
                    Ok(Row {
                        id: id(i),
                        dim: 2,
                        extra: vec![p.m.to_string(), p.notch_w.to_string(), p.notch_d.to_string()],
                        report: Some(rep),
                        runtime_ms: ms,
                        ok: true,
                    })
                })
                .collect();
            (vec!["sliver", "notch_w", "notch_d"], rows)
        }
        "intconvex" => {
            if spec.size < 2 {
                return Err(CliError::Infeasible("intconvex needs size >= 2".into()));
            }
            let grid = GridSpec::new(spec.dim, spec.pitch.clone())?;
            let t = spec.t.clone().expect("family default");
            let rows = (0..spec.trials)
                .into_par_iter()
                .map(|i| {
                    let ((rep, ratio), ms) = timed(spec.timings, || {
                        let (a, b) = intconvex_pair(&mut instance_rng(spec.seed, i as u64), &grid, spec.size)?;
                        Ok((deficit_report(&a, &b, &t)?, common_hull_ratio(&a, &b).ok()))
                    })?;
                    let (lhs, rhs) = ratio.map(|(l, r)| (format_rational(&l), format_rational(&r))).unwrap_or_default();
                    Ok(Row { id: id(i), dim: spec.dim, extra: vec![lhs, rhs], report: Some(rep), runtime_ms: ms, ok: true })
                })
                .collect();
            (vec!["common_hull_excess", "symdiff_over_overlap"], rows)
        }
        _ => return Err(CliError::UnknownFamily(name.to_string())),
    };
    let rows = rows?;
    if let Some(r) = rows.iter().find(|r| r.report.as_ref().is_some_and(|d| d.delta_t < int(0))) {
        return Err(CliError::Assertion(format!("{}: negative delta_t", r.id)));
    }
    Ok(ScenarioOutput { extra_columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_family() {
        assert!(matches!(ScenarioSpec::new("nope", 1), Err(CliError::UnknownFamily(_))));
    }

    #[test]
    fn sharp_rows_follow_h_list() {
        let mut spec = ScenarioSpec::new("sharp-family", 0).unwrap();
        spec.h_list = vec![rat(1, 5), rat(1, 2)];
        let out = run_scenario(&spec).unwrap();
        assert_eq!(out.rows.len(), 2);
        assert_eq!(out.rows[0].extra[0], "1/5");
        assert!(out.rows.iter().all(|r| r.ok));
        spec.h_list = vec![rat(2, 5)];
        assert!(matches!(run_scenario(&spec), Err(CliError::Infeasible(_))));
    }

    #[test]
    fn box_rows_leave_deficits_empty() {
        let mut spec = ScenarioSpec::new("box-hull", 3).unwrap();
        spec.trials = 4;
        let out = run_scenario(&spec).unwrap();
        assert_eq!(out.rows.len(), 4);
        let f = out.rows[0].fields();
        assert_eq!(f[8], "");
        assert_eq!(f.last().unwrap(), "1");
    }
}
