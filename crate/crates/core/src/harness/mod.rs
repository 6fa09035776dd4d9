//! Simulation loop and per-run accounting.
//!
//! Each round draws one gain per channel, plays the selected arm, reveals the
//! gains of its powered channels and charges the round's pseudo-regret
//! `R* − E[R_a]` from the oracle's O1 values. `T_non` counts plays outside the
//! optimal set of the configured objective. Every non-optimal play is also
//! charged to the powered channel with the fewest observations so far (ties
//! to the smallest index), giving the per-channel counters `T̃_i`; plays of
//! the all-zero arm have no powered channel and land in `unattributed`.

mod aggregate;
mod csv;

use rayon::prelude::*;
use thiserror::Error;

use crate::channels::{sample_into, GainRng};
use crate::model::{FeasibleSet, Scenario};
use crate::oracle::{Genie, Objective};
use crate::policies::{make_policy, Observation, Policy, PolicyError, PolicyKind, PolicyOptions, PolicySummary};

pub use aggregate::{
    aggregate, compare_bound, policy_bound, AggregatePoint, AggregateTrace, BoundPoint, BoundReport, BoundedMetric,
};
pub use csv::{write_aggregate_csv, write_bound_csv, write_trace_csv, AGGREGATE_HEADER, BOUND_HEADER, TRACE_HEADER};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("horizon {horizon} is shorter than the {init} initialization rounds of {policy}")]
    HorizonTooShort { policy: PolicyKind, horizon: u64, init: u64 },
    #[error("at least one run is required")]
    NoRuns,
    #[error("traces have different checkpoint schedules")]
    ScheduleMismatch,
    #[error("traces mix policies {0} and {1}")]
    PolicyMismatch(PolicyKind, PolicyKind),
    #[error("no traces to aggregate")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub policy: PolicyKind,
    /// Objective whose optimal set defines `T_non`.
    pub objective: Objective,
    pub horizon: u64,
    pub master_seed: u64,
    pub runs: usize,
    /// Rounds at which metrics are recorded; empty means [`default_checkpoints`].
    pub checkpoints: Vec<u64>,
    pub options: PolicyOptions,
}

impl RunConfig {
    pub fn new(policy: PolicyKind, objective: Objective, horizon: u64, master_seed: u64, runs: usize) -> Self {
        Self {
            policy,
            objective,
            horizon,
            master_seed,
            runs,
            checkpoints: Vec::new(),
            options: PolicyOptions::default(),
        }
    }

    pub fn schedule(&self) -> Vec<u64> {
        if self.checkpoints.is_empty() {
            default_checkpoints(self.horizon)
        } else {
            let mut c: Vec<u64> = self
                .checkpoints
                .iter()
                .copied()
                .filter(|&n| n >= 1 && n <= self.horizon)
                .collect();
            c.sort_unstable();
            c.dedup();
            c
        }
    }
}

/// Powers of two, multiples `{1, 2, 5} × 10^k`, and the horizon itself.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    let mut c = Vec::new();
    let mut p = 1u64;
    while p <= horizon {
        c.push(p);
        p = match p.checked_mul(2) {
            Some(q) => q,
            None => break,
        };
    }
    let mut decade = 1u64;
    while decade <= horizon {
        for m in [1, 2, 5] {
            if let Some(v) = decade.checked_mul(m) {
                if v <= horizon {
                    c.push(v);
                }
            }
        }
        decade = match decade.checked_mul(10) {
            Some(d) => d,
            None => break,
        };
    }
    if horizon >= 1 {
        c.push(horizon);
    }
    c.sort_unstable();
    c.dedup();
    c
}

/// Metrics after `n` rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub n: u64,
    /// `n R* − Σ_t E[R_{a(t)}]` with O1 arm values.
    pub regret: f64,
    /// `n R* − Σ_t R_{a(t)}(t)` with realized rewards.
    pub realized_regret: f64,
    pub t_non: u64,
    pub t_tilde: Vec<u64>,
    pub unattributed: u64,
    /// `m_i(n)`, rounds in which channel `i` was powered.
    pub observations: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub run_index: u64,
    pub policy: PolicyKind,
    pub checkpoints: Vec<Checkpoint>,
    /// `T_a(horizon)` per arm index.
    pub arm_counts: Vec<u64>,
    pub summary: PolicySummary,
}

/// Runs `config.runs` independent traces, concurrently, ordered by run index.
pub fn run(
    scenario: &Scenario,
    feasible: &FeasibleSet,
    genie: &Genie,
    config: &RunConfig,
) -> Result<Vec<RunTrace>, HarnessError> {
    if config.runs == 0 {
        return Err(HarnessError::NoRuns);
    }
    let schedule = config.schedule();
    (0..config.runs as u64)
        .into_par_iter()
        .map(|run_index| {
            let mut policy = make_policy(config.policy, scenario, feasible, config.options)?;
            let mut rng = GainRng::for_run(config.master_seed, run_index);
            run_with_policy(
                scenario,
                feasible,
                genie,
                config.objective,
                policy.as_mut(),
                config.horizon,
                &schedule,
                &mut rng,
                run_index,
            )
        })
        .collect()
}

/// One trace of an already constructed policy.
#[allow(clippy::too_many_arguments)]
pub fn run_with_policy<P: Policy + ?Sized>(
    scenario: &Scenario,
    feasible: &FeasibleSet,
    genie: &Genie,
    objective: Objective,
    policy: &mut P,
    horizon: u64,
    schedule: &[u64],
    rng: &mut GainRng,
    run_index: u64,
) -> Result<RunTrace, HarnessError> {
    let init: Vec<usize> = policy.initialization().to_vec();
    let n_channels = scenario.num_channels();
    if horizon < init.len() as u64 || horizon < n_channels as u64 {
        return Err(HarnessError::HorizonTooShort {
            policy: policy.kind(),
            horizon,
            init: init.len().max(n_channels) as u64,
        });
    }

    let o1 = genie.profile(Objective::O1);
    let target = genie.profile(objective);
    let regret_gap: Vec<f64> = (0..feasible.len()).map(|k| o1.gap(k)).collect();
    let r_star = o1.r_star;
    let rate = scenario.rate();

    let mut gains = vec![0.0; n_channels];
    let mut obs: Vec<Observation> = Vec::with_capacity(n_channels);
    let mut m = vec![0u64; n_channels];
    let mut t_tilde = vec![0u64; n_channels];
    let mut unattributed = 0u64;
    let mut t_non = 0u64;
    let mut regret = 0.0f64;
    let mut realized = 0.0f64;
    let mut arm_counts = vec![0u64; feasible.len()];
    let mut checkpoints = Vec::with_capacity(schedule.len());
    let mut next_cp = schedule.iter().peekable();

    for n in 1..=horizon {
        let arm = match init.get((n - 1) as usize) {
            Some(&k) => k,
            None => policy.select(n),
        };
        sample_into(scenario.laws(), rng, &mut gains);

        let slots = feasible.slots(arm);
        if !target.is_optimal(arm) {
            t_non += 1;
            match slots.iter().map(|s| s.channel).min_by_key(|&c| m[c]) {
                Some(c) => t_tilde[c] += 1,
                None => unattributed += 1,
            }
        }
        regret += regret_gap[arm];
        obs.clear();
        let mut reward = 0.0;
        for s in slots {
            let x = gains[s.channel];
            obs.push(Observation { channel: s.channel, gain: x });
            reward += rate.eval(s.channel, s.power, x);
            m[s.channel] += 1;
        }
        realized += r_star - reward;
        arm_counts[arm] += 1;
        policy.update(arm, &obs)?;

        if next_cp.peek() == Some(&&n) {
            next_cp.next();
            checkpoints.push(Checkpoint {
                n,
                regret,
                realized_regret: realized,
                t_non,
                t_tilde: t_tilde.clone(),
                unattributed,
                observations: m.clone(),
            });
        }
    }

    Ok(RunTrace {
        run_index,
        policy: policy.kind(),
        checkpoints,
        arm_counts,
        summary: policy.summary(),
    })
}
