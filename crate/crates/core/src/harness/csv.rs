//! CSV trace emission.
//!
//! Floats use Rust's shortest round-trip formatting, so output is
//! byte-identical for identical inputs. Per-`ln n` columns are empty at
//! `n = 1`, and `bound_value` is empty for policies without a bound.

use std::io::{self, Write};

use super::{AggregateTrace, BoundReport, RunTrace};

pub const TRACE_HEADER: &str = "run_index,n,regret,regret_per_log_n,t_non,t_non_per_log_n,bound_value";
pub const AGGREGATE_HEADER: &str =
    "n,runs,regret_mean,regret_stderr,regret_per_log_n,t_non_mean,t_non_stderr,t_non_per_log_n,bound_value";
pub const BOUND_HEADER: &str = "n,metric,empirical,bound,ratio,exceeded";

fn per_log(value: f64, n: u64) -> String {
    if n <= 1 {
        String::new()
    } else {
        format!("{}", value / (n as f64).ln())
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// One row per (run, checkpoint), runs in index order.
pub fn write_trace_csv<W: Write>(
    mut w: W,
    traces: &[RunTrace],
    bound: impl Fn(u64) -> Option<f64>,
) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for t in traces {
        for cp in &t.checkpoints {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                t.run_index,
                cp.n,
                cp.regret,
                per_log(cp.regret, cp.n),
                cp.t_non,
                per_log(cp.t_non as f64, cp.n),
                opt(bound(cp.n))
            )?;
        }
    }
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(
    mut w: W,
    summary: &AggregateTrace,
    bound: impl Fn(u64) -> Option<f64>,
) -> io::Result<()> {
    writeln!(w, "{AGGREGATE_HEADER}")?;
    for p in &summary.points {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            p.n,
            summary.runs,
            p.regret_mean,
            p.regret_stderr,
            per_log(p.regret_mean, p.n),
            p.t_non_mean,
            p.t_non_stderr,
            per_log(p.t_non_mean, p.n),
            opt(bound(p.n))
        )?;
    }
    Ok(())
}

pub fn write_bound_csv<W: Write>(mut w: W, report: &BoundReport) -> io::Result<()> {
    writeln!(w, "{BOUND_HEADER}")?;
    for p in &report.points {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p.n,
            report.metric.name(),
            p.empirical,
            p.bound,
            p.ratio,
            p.exceeded
        )?;
    }
    Ok(())
}
