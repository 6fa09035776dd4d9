//! Multi-run averaging and comparison with the theoretical bounds.

use super::{HarnessError, RunTrace};
use crate::oracle::{Genie, Objective};
use crate::policies::PolicyKind;

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatePoint {
    pub n: u64,
    pub regret_mean: f64,
    pub regret_stderr: f64,
    pub t_non_mean: f64,
    pub t_non_stderr: f64,
    pub t_tilde_mean: Vec<f64>,
}

impl AggregatePoint {
    /// `𝕽(n) / ln n`; infinite at `n = 1`.
    pub fn regret_per_log_n(&self) -> f64 {
        self.regret_mean / (self.n as f64).ln()
    }

    pub fn t_non_per_log_n(&self) -> f64 {
        self.t_non_mean / (self.n as f64).ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateTrace {
    pub policy: PolicyKind,
    pub runs: usize,
    pub points: Vec<AggregatePoint>,
}

impl AggregateTrace {
    pub fn at(&self, n: u64) -> Option<&AggregatePoint> {
        self.points.iter().find(|p| p.n == n)
    }

    pub fn last(&self) -> &AggregatePoint {
        self.points.last().expect("aggregate has at least one checkpoint")
    }
}

fn mean_stderr(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let k = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / k;
    if k < 2.0 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Mean and standard error per checkpoint, folded in run order.
pub fn aggregate(traces: &[RunTrace]) -> Result<AggregateTrace, HarnessError> {
    let first = traces.first().ok_or(HarnessError::Empty)?;
    for t in traces {
        if t.policy != first.policy {
            return Err(HarnessError::PolicyMismatch(first.policy, t.policy));
        }
        if t.checkpoints.len() != first.checkpoints.len()
            || t.checkpoints.iter().zip(&first.checkpoints).any(|(a, b)| a.n != b.n)
        {
            return Err(HarnessError::ScheduleMismatch);
        }
    }
    let channels = first.checkpoints.first().map_or(0, |c| c.t_tilde.len());
    let points = (0..first.checkpoints.len())
        .map(|c| {
            let (regret_mean, regret_stderr) = mean_stderr(traces.iter().map(|t| t.checkpoints[c].regret));
            let (t_non_mean, t_non_stderr) = mean_stderr(traces.iter().map(|t| t.checkpoints[c].t_non as f64));
            let t_tilde_mean = (0..channels)
                .map(|i| mean_stderr(traces.iter().map(|t| t.checkpoints[c].t_tilde[i] as f64)).0)
                .collect();
            AggregatePoint {
                n: first.checkpoints[c].n,
                regret_mean,
                regret_stderr,
                t_non_mean,
                t_non_stderr,
                t_tilde_mean,
            }
        })
        .collect();
    Ok(AggregateTrace {
        policy: first.policy,
        runs: traces.len(),
        points,
    })
}

/// Quantity a policy's guarantee bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundedMetric {
    Regret,
    NonOptimalPlays,
}

impl BoundedMetric {
    pub fn name(self) -> &'static str {
        match self {
            BoundedMetric::Regret => "regret",
            BoundedMetric::NonOptimalPlays => "t_non",
        }
    }

    pub fn of(self, p: &AggregatePoint) -> f64 {
        match self {
            BoundedMetric::Regret => p.regret_mean,
            BoundedMetric::NonOptimalPlays => p.t_non_mean,
        }
    }
}

/// The guarantee attached to `policy`, if any: the regret bound for CWF1 and
/// the non-optimal play bound for CWF2.
pub fn policy_bound(policy: PolicyKind, genie: &Genie, n: u64) -> Option<(BoundedMetric, f64)> {
    match policy {
        PolicyKind::Cwf1 => genie
            .profile(Objective::O1)
            .cwf1_regret_bound(n)
            .map(|b| (BoundedMetric::Regret, b)),
        PolicyKind::Cwf2 => genie
            .profile(Objective::O2)
            .cwf2_non_optimal_bound(n)
            .map(|b| (BoundedMetric::NonOptimalPlays, b)),
        PolicyKind::Ucb1 | PolicyKind::Llr => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundPoint {
    pub n: u64,
    pub empirical: f64,
    pub bound: f64,
    pub ratio: f64,
    pub exceeded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub metric: BoundedMetric,
    pub points: Vec<BoundPoint>,
}

impl BoundReport {
    pub fn any_exceeded(&self) -> bool {
        self.points.iter().any(|p| p.exceeded)
    }
}

/// Empirical mean against `bound(n)` at every checkpoint.
pub fn compare_bound(summary: &AggregateTrace, metric: BoundedMetric, bound: impl Fn(u64) -> f64) -> BoundReport {
    let points = summary
        .points
        .iter()
        .map(|p| {
            let empirical = metric.of(p);
            let b = bound(p.n);
            BoundPoint {
                n: p.n,
                empirical,
                bound: b,
                ratio: empirical / b,
                exceeded: empirical > b,
            }
        })
        .collect();
    BoundReport { metric, points }
}
