//! Online-learning policies behind one select/update interface.
//!
//! | policy | statistics kept | index of arm `a` |
//! |--------|-----------------|------------------|
//! | CWF1 | `ȳ_{i,b}` per (channel, level), `m_i` per channel | `Σ ȳ_{i,a_i} + √((L+1) ln n / m_i)` |
//! | CWF2 | `x̄_i`, `m_i` per channel | `Σ f_i(a_i, x̄_i) + f_i(a_i, √((L+1) ln n / m_i))` |
//! | UCB1 | mean reward and count per arm | `Ŷ_k + √(2 ln n / m_k)` |
//! | LLR  | `ȳ_{i,b}` and `m_{i,b}` per (channel, level) | `Σ ȳ_{i,a_i} + √((L+1) ln n / m_{i,a_i})` |
//!
//! Every argmax breaks ties toward the smallest arm index, and `n` is the
//! 1-based index of the round being played, initialization included.

mod cwf1;
mod cwf2;
mod knapsack;
mod llr;
mod ucb1;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{FeasibleSet, Scenario};

pub use cwf1::Cwf1;
pub use cwf2::Cwf2;
pub use knapsack::KnapsackSolver;
pub use llr::Llr;
pub use ucb1::Ucb1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("channel {0} is not powered by any feasible arm")]
    ChannelNeverPowered(usize),
    #[error("gain reported for channel {channel}, which arm {arm} does not power")]
    UnexpectedChannel { arm: usize, channel: usize },
    #[error("no gain reported for channel {channel} of arm {arm}")]
    MissingChannel { arm: usize, channel: usize },
    #[error("arm index {0} is out of range")]
    UnknownArm(usize),
    #[error("unknown policy `{0}` (expected cwf1, cwf2, ucb1 or llr)")]
    UnknownPolicy(String),
    #[error("L override must be at least 1")]
    BadExplorationConstant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Cwf1,
    Cwf2,
    Ucb1,
    Llr,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [PolicyKind::Cwf1, PolicyKind::Cwf2, PolicyKind::Llr, PolicyKind::Ucb1];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Cwf1 => "cwf1",
            PolicyKind::Cwf2 => "cwf2",
            PolicyKind::Ucb1 => "ucb1",
            PolicyKind::Llr => "llr",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cwf1" => Ok(PolicyKind::Cwf1),
            "cwf2" => Ok(PolicyKind::Cwf2),
            "ucb1" => Ok(PolicyKind::Ucb1),
            "llr" => Ok(PolicyKind::Llr),
            other => Err(PolicyError::UnknownPolicy(other.to_string())),
        }
    }
}

/// How the index maximization over the feasible set is carried out.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArgmaxStrategy {
    #[default]
    Exhaustive,
    /// Multiple-choice knapsack over (channel, level); needs a feasible set
    /// defined by the budget alone.
    Knapsack,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PolicyOptions {
    /// Replaces `L = max_a |A_a|` in the exploration bonus.
    pub l_override: Option<usize>,
    pub argmax: ArgmaxStrategy,
}

/// Gain of one powered channel (semi-bandit feedback).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub channel: usize,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicySummary {
    pub policy: PolicyKind,
    /// Number of stored statistics (means and counters, excluding `n`).
    pub state_size: usize,
    pub counts: Vec<u64>,
    pub means: Vec<f64>,
}

pub trait Policy: Send {
    fn kind(&self) -> PolicyKind;

    /// Arms played, in order, before the index rule takes over.
    fn initialization(&self) -> &[usize];

    /// Arm to play at round `round` (1-based) of the main loop.
    fn select(&mut self, round: u64) -> usize;

    /// Feeds back the gains of exactly the channels `arm` powers, in
    /// increasing channel order.
    fn update(&mut self, arm: usize, observations: &[Observation]) -> Result<(), PolicyError>;

    fn summary(&self) -> PolicySummary;
}

/// One arm per channel `t`: the first arm in lexicographic order powering `t`.
pub fn initialization_playlist(feasible: &FeasibleSet) -> Result<Vec<usize>, PolicyError> {
    (0..feasible.num_channels())
        .map(|t| {
            (0..feasible.len())
                .find(|&k| feasible.arm(k).levels()[t] != 0)
                .ok_or(PolicyError::ChannelNeverPowered(t))
        })
        .collect()
}

/// Checks that `observations` cover exactly the support of `arm`.
pub fn check_feedback(feasible: &FeasibleSet, arm: usize, observations: &[Observation]) -> Result<(), PolicyError> {
    if arm >= feasible.len() {
        return Err(PolicyError::UnknownArm(arm));
    }
    let slots = feasible.slots(arm);
    for (k, obs) in observations.iter().enumerate() {
        match slots.get(k) {
            Some(s) if s.channel == obs.channel => {}
            Some(s) if obs.channel > s.channel => {
                return Err(PolicyError::MissingChannel { arm, channel: s.channel })
            }
            _ => {
                return Err(PolicyError::UnexpectedChannel {
                    arm,
                    channel: obs.channel,
                })
            }
        }
    }
    if let Some(s) = slots.get(observations.len()) {
        return Err(PolicyError::MissingChannel { arm, channel: s.channel });
    }
    Ok(())
}

/// Picks the arm maximizing a sum of per-(channel, level) scores.
#[derive(Debug, Clone)]
pub(crate) enum ArmSelector {
    Exhaustive,
    Knapsack(KnapsackSolver),
}

impl ArmSelector {
    pub(crate) fn new(strategy: ArgmaxStrategy, scenario: &Scenario) -> Self {
        match strategy {
            ArgmaxStrategy::Exhaustive => ArmSelector::Exhaustive,
            ArgmaxStrategy::Knapsack => ArmSelector::Knapsack(KnapsackSolver::new(scenario)),
        }
    }

    pub(crate) fn best(&self, feasible: &FeasibleSet, var_scores: &[f64]) -> usize {
        match self {
            ArmSelector::Exhaustive => exhaustive_argmax(feasible, var_scores),
            ArmSelector::Knapsack(solver) => solver
                .best_arm(feasible, var_scores)
                .unwrap_or_else(|| exhaustive_argmax(feasible, var_scores)),
        }
    }
}

/// Scans every arm; the first (smallest-index) maximizer wins.
pub fn exhaustive_argmax(feasible: &FeasibleSet, var_scores: &[f64]) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for k in 0..feasible.len() {
        let score: f64 = feasible.slots(k).iter().map(|s| var_scores[s.var]).sum();
        if score > best_score {
            best_score = score;
            best = k;
        }
    }
    best
}

/// Builds a policy for `scenario` over `feasible`.
pub fn make_policy<'a>(
    kind: PolicyKind,
    scenario: &'a Scenario,
    feasible: &'a FeasibleSet,
    options: PolicyOptions,
) -> Result<Box<dyn Policy + 'a>, PolicyError> {
    if options.l_override == Some(0) {
        return Err(PolicyError::BadExplorationConstant);
    }
    Ok(match kind {
        PolicyKind::Cwf1 => Box::new(Cwf1::new(scenario, feasible, options)?),
        PolicyKind::Cwf2 => Box::new(Cwf2::new(scenario, feasible, options)?),
        PolicyKind::Ucb1 => Box::new(Ucb1::new(scenario, feasible)),
        PolicyKind::Llr => Box::new(Llr::new(scenario, feasible, options)?),
    })
}

/// `√((L+1) ln n / m)`, infinite for an unobserved variable.
#[inline]
pub(crate) fn confidence_radius(l: usize, ln_n: f64, m: u64) -> f64 {
    if m == 0 {
        f64::INFINITY
    } else {
        ((l as f64 + 1.0) * ln_n / m as f64).sqrt()
    }
}
