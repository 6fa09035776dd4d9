//! Command-line entry point.
//!
//! Exit codes: 0 success, 2 usage error, 3 configuration error, 4 runtime
//! error.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{ConfigError, ConfigFile, PolicySelection};
use crate::harness::{
    self, aggregate, compare_bound, policy_bound, write_aggregate_csv, write_bound_csv, write_trace_csv,
};
use crate::model::{FeasibleSet, Scenario};
use crate::oracle::{GapProfile, Genie};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "swf", version, about = "Online power allocation with combinatorial bandits")]
pub struct Cli {
    /// Experiment file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count the feasible allocations.
    Enumerate {
        /// Also print every arm with its index.
        #[arg(long)]
        list: bool,
    },
    /// Solve both objectives and print optimal arms, gaps and B_min.
    Oracle,
    /// Simulate policies and write CSV traces.
    Run {
        /// cwf1, cwf2, ucb1, llr or all.
        #[arg(long)]
        policy: Option<PolicySelection>,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
    /// Evaluate the CWF1 regret bound and the CWF2 non-optimal play bound.
    Bounds {
        /// Horizons, comma separated.
        #[arg(long = "n", value_delimiter = ',', required = true, num_args = 1..)]
        n: Vec<u64>,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(msg)) => {
            let _ = writeln!(err, "config error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::Config("--config <PATH> is required".to_string()))?;
    let cfg = ConfigFile::load(path)?;
    let scenario = cfg.build_scenario()?;
    let feasible = FeasibleSet::enumerate(&scenario).map_err(|e| Failure::Config(format!("scenario: {e}")))?;
    match &cli.command {
        Command::Enumerate { list } => cmd_enumerate(&feasible, *list, out),
        Command::Oracle => cmd_oracle(&scenario, &feasible, out),
        Command::Run {
            policy,
            horizon,
            runs,
            seed,
            out_dir,
        } => {
            let mut cfg = cfg.clone();
            if let Some(p) = policy {
                cfg.run.policy = *p;
            }
            if let Some(h) = horizon {
                cfg.run.horizon = *h;
            }
            if let Some(r) = runs {
                cfg.run.runs = *r;
            }
            if let Some(s) = seed {
                cfg.run.master_seed = *s;
            }
            if let Some(d) = out_dir {
                cfg.output.directory = d.clone();
            }
            cfg.validate()?;
            cmd_run(&cfg, &scenario, &feasible, out)
        }
        Command::Bounds { n } => cmd_bounds(&scenario, &feasible, n, out),
    }
}

fn cmd_enumerate(feasible: &FeasibleSet, list: bool, out: &mut dyn Write) -> Result<(), Failure> {
    writeln!(out, "|F| = {}, L = {}", feasible.len(), feasible.max_support()).map_err(runtime)?;
    writeln!(out, "a_max_mw = {}", feasible.a_max()).map_err(runtime)?;
    writeln!(out, "lifted_variables = {}", feasible.num_vars()).map_err(runtime)?;
    if list {
        for (k, arm) in feasible.arms().iter().enumerate() {
            writeln!(out, "{k}\t{arm}").map_err(runtime)?;
        }
    }
    Ok(())
}

fn arms_text(feasible: &FeasibleSet, arms: &[usize]) -> String {
    arms.iter()
        .map(|&k| format!("{k}:{}", feasible.arm(k)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn print_profile(p: &GapProfile, feasible: &FeasibleSet, out: &mut dyn Write) -> std::io::Result<()> {
    let key = p.objective;
    writeln!(out, "{key}.optimal_value = {}", p.r_star)?;
    writeln!(out, "{key}.optimal_arms = {}", arms_text(feasible, &p.optimal_arms))?;
    match p.gaps {
        Some(g) => {
            writeln!(out, "{key}.delta_min = {}", g.delta_min)?;
            writeln!(out, "{key}.delta_max = {}", g.delta_max)?;
        }
        None => writeln!(out, "{key}.gaps = undefined (every arm is optimal)")?,
    }
    Ok(())
}

fn cmd_oracle(scenario: &Scenario, feasible: &FeasibleSet, out: &mut dyn Write) -> Result<(), Failure> {
    let genie = Genie::solve(scenario, feasible).map_err(runtime)?;
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "channels = {}", scenario.num_channels())?;
        writeln!(out, "arms = {}", feasible.len())?;
        writeln!(out, "max_support = {}", feasible.max_support())?;
        writeln!(out, "a_max_mw = {}", feasible.a_max())?;
        for (i, law) in scenario.laws().iter().enumerate() {
            writeln!(out, "channel.{i}.mean_gain = {}", law.mean())?;
            if let crate::channels::ChannelDistribution::TruncatedRayleigh(r) = law {
                writeln!(out, "channel.{i}.g_max = {}", r.g_max())?;
                writeln!(out, "channel.{i}.truncation_mass = {}", r.truncation_mass())?;
            }
        }
        print_profile(&genie.o1, feasible, out)?;
        print_profile(&genie.o2, feasible, out)?;
        match genie.o2.b_min {
            Some(b) => writeln!(out, "o2.b_min = {b}")?,
            None => writeln!(out, "o2.b_min = undefined")?,
        }
        writeln!(out, "pseudo_rate_separates_o1_optimum = {}", genie.pseudo_rate_separates())?;
        Ok(())
    };
    write().map_err(runtime)
}

fn cmd_bounds(scenario: &Scenario, feasible: &FeasibleSet, ns: &[u64], out: &mut dyn Write) -> Result<(), Failure> {
    let genie = Genie::solve(scenario, feasible).map_err(runtime)?;
    let mut missing = Vec::new();
    if genie.o1.gaps.is_none() {
        missing.push("cwf1_regret_bound: every arm is O1-optimal, so Δ_min is undefined");
    }
    if genie.o2.gaps.is_none() {
        missing.push("cwf2_non_optimal_bound: every arm is O2-optimal, so δ_min and B_min are undefined");
    } else if genie.o2.b_min.is_none() {
        missing.push("cwf2_non_optimal_bound: B_min could not be computed");
    }
    let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x}"));
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "n\tln_n\tcwf1_regret_bound\tcwf2_non_optimal_bound\tcwf2_regret_bound")?;
        for &n in ns {
            writeln!(
                out,
                "{n}\t{}\t{}\t{}\t{}",
                (n.max(1) as f64).ln(),
                fmt(genie.o1.cwf1_regret_bound(n)),
                fmt(genie.o2.cwf2_non_optimal_bound(n)),
                fmt(genie.cwf2_regret_bound(n)),
            )?;
        }
        Ok(())
    };
    write().map_err(runtime)?;
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(missing.join("; ")))
    }
}

/// Files written by one `run` invocation, removed again if it fails.
struct OutputGuard {
    files: Vec<PathBuf>,
    created_dir: Option<PathBuf>,
    keep: bool,
}

impl OutputGuard {
    fn create(&mut self, path: PathBuf) -> std::io::Result<BufWriter<File>> {
        let f = File::create(&path)?;
        self.files.push(path);
        Ok(BufWriter::new(f))
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if self.keep {
            return;
        }
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if let Some(d) = &self.created_dir {
            let _ = fs::remove_dir(d);
        }
    }
}

fn cmd_run(cfg: &ConfigFile, scenario: &Scenario, feasible: &FeasibleSet, out: &mut dyn Write) -> Result<(), Failure> {
    let genie = Genie::solve(scenario, feasible).map_err(runtime)?;
    let dir = &cfg.output.directory;
    let mut guard = OutputGuard {
        files: Vec::new(),
        created_dir: (!dir.exists()).then(|| dir.clone()),
        keep: false,
    };
    fs::create_dir_all(dir).map_err(|e| runtime(format!("cannot create {}: {e}", dir.display())))?;

    let mut w = guard.create(dir.join("config.toml")).map_err(runtime)?;
    w.write_all(cfg.to_canonical_string().as_bytes()).map_err(runtime)?;
    w.flush().map_err(runtime)?;

    for kind in cfg.run.policy.kinds() {
        let run_cfg = cfg.run_config(kind);
        let traces = harness::run(scenario, feasible, &genie, &run_cfg).map_err(runtime)?;
        let summary = aggregate(&traces).map_err(runtime)?;
        let bound = |n: u64| policy_bound(kind, &genie, n).map(|(_, b)| b);

        write_file(&mut guard, &dir.join(format!("{kind}_traces.csv")), |w| {
            write_trace_csv(w, &traces, bound)
        })?;
        write_file(&mut guard, &dir.join(format!("{kind}_aggregate.csv")), |w| {
            write_aggregate_csv(w, &summary, bound)
        })?;
        if let Some((metric, _)) = policy_bound(kind, &genie, 1) {
            let report = compare_bound(&summary, metric, |n| bound(n).unwrap_or(f64::INFINITY));
            write_file(&mut guard, &dir.join(format!("{kind}_bound.csv")), |w| write_bound_csv(w, &report))?;
            if report.any_exceeded() {
                writeln!(out, "{kind}: empirical {} exceeds its bound at some checkpoint", metric.name())
                    .map_err(runtime)?;
            }
        }

        let last = summary.last();
        writeln!(
            out,
            "{kind}: n = {}, runs = {}, objective = {}, regret = {} ± {}, t_non = {} ± {}, t_non/n = {}",
            last.n,
            summary.runs,
            run_cfg.objective,
            last.regret_mean,
            last.regret_stderr,
            last.t_non_mean,
            last.t_non_stderr,
            last.t_non_mean / last.n as f64
        )
        .map_err(runtime)?;
    }
    writeln!(out, "wrote {}", dir.display()).map_err(runtime)?;
    guard.keep = true;
    Ok(())
}

fn write_file(
    guard: &mut OutputGuard,
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), Failure> {
    let mut w = guard.create(path.to_path_buf()).map_err(runtime)?;
    body(&mut w).and_then(|()| w.flush()).map_err(runtime)
}
