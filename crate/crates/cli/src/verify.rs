//! Randomized check suites behind `bmlab verify` and `bmlab crosscheck`.

use bmlab_core::deficits::delta_t;
use bmlab_core::families::{equalize, oracle_instance};
use bmlab_core::oracle::{crosscheck_instance, CrosscheckReport, Verdict};
use bmlab_core::rational::rat;
use num_traits::Signed;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::scenario::{run_scenario, ScenarioSpec};

pub const SUITES: [&str; 5] = ["freiman", "box-hull", "sharp", "nonneg", "oracle"];

/// Cell cap of the random oracle instances.
pub const ORACLE_MAX_CELLS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifySummary {
    pub suite: String,
    pub total: usize,
    pub failures: Vec<String>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn line(&self) -> String {
        format!("verify {}: {}/{} passed", self.suite, self.total - self.failures.len(), self.total)
    }
}

fn from_scenario(suite: &str, spec: &ScenarioSpec) -> CliResult<VerifySummary> {
    let out = run_scenario(spec)?;
    Ok(VerifySummary {
        suite: suite.into(),
        total: out.rows.len(),
        failures: out.failures().iter().map(|r| r.id.clone()).collect(),
    })
}

pub fn crosscheck(trials: usize, seed: u64) -> CliResult<Vec<CrosscheckReport>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let (a, b, t) = oracle_instance(seed, i as u64, ORACLE_MAX_CELLS)?;
            Ok(crosscheck_instance(&i.to_string(), &a, &b, &t))
        })
        .collect()
}

pub fn run_suite(suite: &str, trials: usize, seed: u64) -> CliResult<VerifySummary> {
    match suite {
        "freiman" | "box-hull" => {
            let mut spec = ScenarioSpec::new(if suite == "freiman" { "freiman1d" } else { "box-hull" }, seed)?;
            spec.trials = trials;
            from_scenario(suite, &spec)
        }
        "sharp" => {
            let mut spec = ScenarioSpec::new("sharp-family", seed)?;
            spec.h_list = (1..=trials.min(10)).map(|k| rat(1, 1 << k)).collect();
            from_scenario(suite, &spec)
        }
        "nonneg" => {
            let failures = (0..trials)
                .into_par_iter()
                .map(|i| -> CliResult<Option<String>> {
                    let (a, b, t) = oracle_instance(seed, i as u64, ORACLE_MAX_CELLS)?;
                    let n = a.len().min(b.len());
                    let d = delta_t(&equalize(&a, n), &equalize(&b, n), &t);
                    Ok(match d {
                        Ok(d) if !d.is_negative() => None,
                        Ok(d) => Some(format!("{i}: delta_t = {d}")),
                        Err(e) => Some(format!("{i}: {e}")),
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(VerifySummary { suite: suite.into(), total: trials, failures: failures.into_iter().flatten().collect() })
        }
        "oracle" => {
            let reports = crosscheck(trials, seed)?;
            let failures = reports.iter().filter(|r| r.verdict() == Verdict::Fail).map(|r| r.instance_id.clone()).collect();
            Ok(VerifySummary { suite: suite.into(), total: trials, failures })
        }
        _ => Err(CliError::Usage(format!("unknown suite {suite:?} (expected one of {})", SUITES.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for s in SUITES {
            let r = run_suite(s, 3, 11).unwrap();
            assert!(r.passed(), "{}", r.line());
        }
        assert!(run_suite("bogus", 1, 0).is_err());
    }
}
