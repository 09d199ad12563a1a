use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use bmlab_cli::config::Config;
use bmlab_cli::report::{emit_report, render_csv};
use bmlab_cli::scenario::{run_scenario, ScenarioSpec};
use bmlab_cli::setfile::parse_set_file;
use bmlab_cli::verify::{crosscheck, run_suite};
use bmlab_cli::{CliError, CliResult};
use bmlab_core::deficits::{deficit_report, DeficitReport};
use bmlab_core::oracle::{CrosscheckReport, Verdict};
use bmlab_core::partition::{linear_partition_process, PartitionOptions};
use bmlab_core::rational::parse_rational;
use bmlab_core::{Rational, Weight};
use clap::{Parser, Subcommand};

/// Exact-arithmetic experiments on Brunn-Minkowski stability for lattice cell sets.
///
/// Exit status: 0 when every check passed, 1 when a check failed, 2 on bad usage or input.
#[derive(Parser, Debug)]
#[command(name = "bmlab", version)]
struct Cli {
    /// `key = value` file; its entries override flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fill the runtime_ms column (makes output run-dependent).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Deficit report of two equal-volume set files.
    Deficit {
        #[arg(long)]
        set_a: Option<PathBuf>,
        #[arg(long)]
        set_b: Option<PathBuf>,
        #[arg(long)]
        t: Option<String>,
    },
    /// Run an instance family: sharp-family, freiman1d, box-hull, perturbed-convex, intconvex.
    Scenario {
        name: String,
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        pitch: Option<String>,
        /// Comma-separated pitches for sharp-family, e.g. `1/2,1/4`.
        #[arg(long)]
        h_list: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Sampling box side in cells (intconvex).
        #[arg(long)]
        size: Option<i64>,
        /// CSV path; a `.plot.dat` companion is written next to it. Stdout if absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Randomized checks: freiman, box-hull, sharp, nonneg, oracle.
    Verify {
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Linear partition process on a set file.
    Partition {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        max_depth: Option<usize>,
        /// Also write the leaves as CSV here.
        #[arg(long)]
        leaves: Option<PathBuf>,
    },
    /// Compare kernel results with the independent oracle on random instances.
    Crosscheck {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Flag values after config overrides.
struct Opts {
    config: Config,
}

impl Opts {
    fn raw(&self, key: &str, flag: Option<String>) -> Option<String> {
        self.config.or_flag(key, flag)
    }

    fn value<T: FromStr>(&self, key: &str, flag: Option<T>) -> CliResult<Option<T>> {
        match self.config.get(key) {
            Some(v) => v.parse().map(Some).map_err(|_| CliError::Usage(format!("config: bad value {v:?} for {key}"))),
            None => Ok(flag),
        }
    }

    fn required(&self, key: &str, flag: Option<String>) -> CliResult<String> {
        self.raw(key, flag).ok_or_else(|| CliError::Usage(format!("missing --{key}")))
    }

    fn seed(&self, flag: Option<u64>) -> CliResult<u64> {
        if let Some(s) = self.value("seed", flag)? {
            return Ok(s);
        }
        match std::env::var("BMLAB_SEED") {
            Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("BMLAB_SEED: not a u64: {v:?}"))),
            Err(_) => Ok(0),
        }
    }
}

fn rational(s: &str) -> CliResult<Rational> {
    Ok(parse_rational(s)?)
}

fn weight(s: &str) -> CliResult<Weight> {
    Ok(Weight::new(rational(s)?)?)
}

fn write_out(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io { path: p.clone(), source: e }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let o = Opts { config };
    let timings = o.value("timings", Some(cli.timings))?.unwrap_or(false);
    match cli.command {
        Command::Deficit { set_a, set_b, t } => {
            let a = parse_set_file(&PathBuf::from(o.required("set-a", set_a.map(|p| p.display().to_string()))?))?;
            let b = parse_set_file(&PathBuf::from(o.required("set-b", set_b.map(|p| p.display().to_string()))?))?;
            let t = weight(&o.required("t", t)?)?;
            let start = Instant::now();
            let rep = deficit_report(&a, &b, &t)?;
            let ms = timings.then(|| start.elapsed().as_millis());
            println!("{}", DeficitReport::CSV_COLUMNS.join(","));
            println!("{}", rep.csv_fields("deficit", ms).join(","));
            Ok(())
        }
        Command::Scenario { name, t, dim, pitch, h_list, trials, seed, size, output } => {
            let mut spec = ScenarioSpec::new(&name, o.seed(seed)?)?;
            spec.timings = timings;
            if let Some(t) = o.raw("t", t) {
                spec.t = Some(weight(&t)?);
            }
            if let Some(d) = o.value("dim", dim)? {
                spec.dim = d;
            }
            if let Some(p) = o.raw("pitch", pitch) {
                spec.pitch = rational(&p)?;
            }
            if let Some(h) = o.raw("h-list", h_list) {
                spec.h_list = h.split(',').map(rational).collect::<CliResult<_>>()?;
            }
            if let Some(n) = o.value("trials", trials)? {
                spec.trials = n;
            }
            if let Some(s) = o.value("size", size)? {
                spec.size = s;
            }
            spec.output = o.raw("output", output.map(|p| p.display().to_string())).map(PathBuf::from);
            let out = run_scenario(&spec)?;
            match &spec.output {
                Some(p) => {
                    emit_report(&out, p)?;
                }
                None => print!("{}", render_csv(&out)?),
            }
            let bad = out.failures();
            if !bad.is_empty() {
                let ids: Vec<&str> = bad.iter().map(|r| r.id.as_str()).collect();
                return Err(CliError::Assertion(format!("{} row(s) failed: {}", ids.len(), ids.join(" "))));
            }
            Ok(())
        }
        Command::Verify { suite, trials, seed } => {
            let trials = o.value("trials", trials)?.unwrap_or(100);
            let summary = run_suite(&suite, trials, o.seed(seed)?)?;
            println!("{}", summary.line());
            for f in &summary.failures {
                println!("  failed: {f}");
            }
            if summary.passed() {
                Ok(())
            } else {
                Err(CliError::Assertion(summary.line()))
            }
        }
        Command::Partition { input, t, eps, max_depth, leaves } => {
            let a = parse_set_file(&PathBuf::from(o.required("input", input.map(|p| p.display().to_string()))?))?;
            let t = weight(&o.raw("t", t).unwrap_or_else(|| "1/2".into()))?;
            let eps = rational(&o.raw("eps", eps).unwrap_or_else(|| "1/4".into()))?;
            let depth = o.value("max-depth", max_depth)?.unwrap_or(4);
            let tree = linear_partition_process(&a, &t, &eps, &PartitionOptions::with_depth(depth))?;
            print!("{}", tree.dump());
            if let Some(p) = o.raw("leaves", leaves.map(|p| p.display().to_string())) {
                write_out(Some(&PathBuf::from(p)), &tree.leaves_csv())?;
            }
            if !tree.conserves_volume() {
                return Err(CliError::Assertion("child volumes do not sum to their parent".into()));
            }
            if !tree.splits_ok() {
                return Err(CliError::Assertion("a split violates the central-point ratios".into()));
            }
            Ok(())
        }
        Command::Crosscheck { trials, seed, output } => {
            let trials = o.value("trials", trials)?.unwrap_or(200);
            let reports = crosscheck(trials, o.seed(seed)?)?;
            let mut csv = format!("{}\n", CrosscheckReport::CSV_HEADER);
            for r in &reports {
                csv.push_str(&r.csv_rows());
            }
            let output = o.raw("output", output.map(|p| p.display().to_string())).map(PathBuf::from);
            write_out(output.as_ref(), &csv)?;
            let failed = reports.iter().filter(|r| r.verdict() == Verdict::Fail).count();
            if failed > 0 {
                return Err(CliError::Assertion(format!("{failed}/{trials} instances disagree with the oracle")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bmlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
