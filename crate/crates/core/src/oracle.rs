//! Distribution-aware genie: exact arm values under both objectives, the
//! optimal sets, gap constants, and the closed-form regret bounds.
//!
//! * O1 scores an arm by its expected sum rate `Σ E[f_i(a_i, X_i)]`.
//! * O2 scores it by the pseudo-rate `Σ f_i(a_i, θ_i)` on mean gains.
//!
//! Both are solved by exhaustive evaluation over the feasible set.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{FeasibleSet, PowerAllocation, PowerMw, RateFunction, Scenario};

/// Relative tolerance under which two arm values count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("δ_min is undefined: every arm is optimal under {0}")]
    UndefinedGap(Objective),
    #[error("cannot solve f(a, x) = {target} for channel {channel} at {power} mW")]
    Unsolvable { channel: usize, power: PowerMw, target: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Expected sum rate.
    O1,
    /// Sum pseudo-rate over mean gains.
    O2,
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Objective::O1 => "o1",
            Objective::O2 => "o2",
        })
    }
}

/// `E[Σ_{i∈A_a} f_i(a_i, X_i)]`.
pub fn o1_value(scenario: &Scenario, arm: &PowerAllocation) -> f64 {
    arm.support()
        .map(|i| scenario.laws()[i].expected_rate(scenario.rate(), i, arm.levels()[i]))
        .sum()
}

/// `Σ_{i∈A_a} f_i(a_i, θ_i)`.
pub fn o2_value(scenario: &Scenario, arm: &PowerAllocation) -> f64 {
    arm.support()
        .map(|i| scenario.rate().eval(i, arm.levels()[i], scenario.laws()[i].mean()))
        .sum()
}

/// Per `(channel, level)` contribution to an arm's value, indexed by the
/// feasible set's lifted-variable index.
pub fn level_values(scenario: &Scenario, feasible: &FeasibleSet, objective: Objective) -> Vec<f64> {
    let mut out = vec![0.0; feasible.num_vars()];
    for channel in 0..scenario.num_channels() {
        let law = &scenario.laws()[channel];
        let theta = law.mean();
        for (level, &power) in scenario.levels(channel).iter().enumerate() {
            out[feasible.var_index(channel, level)] = match objective {
                Objective::O1 => law.expected_rate(scenario.rate(), channel, power),
                Objective::O2 => scenario.rate().eval(channel, power, theta),
            };
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaps {
    pub delta_min: f64,
    pub delta_max: f64,
}

/// Solution of one objective over a feasible set.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile {
    pub objective: Objective,
    /// Objective value of every arm, by arm index.
    pub values: Vec<f64>,
    /// `R*` for O1, `r*` for O2.
    pub r_star: f64,
    /// `O*`, every arm tied with the best value.
    pub optimal_arms: Vec<usize>,
    optimal_mask: Vec<bool>,
    /// `None` when every arm is optimal (no suboptimal arm to measure).
    pub gaps: Option<Gaps>,
    pub a_max: PowerMw,
    /// `L`
    pub max_support: usize,
    pub num_channels: usize,
    /// Only computed for O2.
    pub b_min: Option<f64>,
}

impl GapProfile {
    #[inline]
    pub fn is_optimal(&self, arm: usize) -> bool {
        self.optimal_mask[arm]
    }

    /// `r* − r_a`, zero on optimal arms.
    #[inline]
    pub fn gap(&self, arm: usize) -> f64 {
        if self.optimal_mask[arm] {
            0.0
        } else {
            self.r_star - self.values[arm]
        }
    }

    /// Set when the scenario cannot separate arms at all.
    pub fn is_degenerate(&self) -> bool {
        self.gaps.is_none()
    }

    pub fn cwf1_regret_bound(&self, n: u64) -> Option<f64> {
        let g = self.gaps?;
        Some(cwf1_regret_bound(
            f64::from(self.a_max),
            self.max_support,
            self.num_channels,
            g.delta_min,
            g.delta_max,
            n,
        ))
    }

    pub fn cwf2_non_optimal_bound(&self, n: u64) -> Option<f64> {
        Some(cwf2_non_optimal_bound(self.b_min?, self.max_support, self.num_channels, n))
    }
}

/// Evaluates `objective` on every arm and records the optimum and gaps.
/// For O2 it also derives `B_min`.
pub fn solve(scenario: &Scenario, feasible: &FeasibleSet, objective: Objective) -> Result<GapProfile, OracleError> {
    let per_var = level_values(scenario, feasible, objective);
    let values: Vec<f64> = (0..feasible.len())
        .map(|k| feasible.slots(k).iter().map(|s| per_var[s.var]).sum())
        .collect();
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cutoff = best - TIE_TOLERANCE * best.abs().max(1.0);
    let optimal_mask: Vec<bool> = values.iter().map(|&v| v >= cutoff).collect();
    let optimal_arms: Vec<usize> = (0..values.len()).filter(|&k| optimal_mask[k]).collect();

    let suboptimal_gaps = values
        .iter()
        .zip(&optimal_mask)
        .filter(|(_, &opt)| !opt)
        .map(|(&v, _)| best - v);
    let gaps = suboptimal_gaps.fold(None, |acc: Option<Gaps>, g| {
        Some(match acc {
            None => Gaps {
                delta_min: g,
                delta_max: g,
            },
            Some(a) => Gaps {
                delta_min: a.delta_min.min(g),
                delta_max: a.delta_max.max(g),
            },
        })
    });

    let mut profile = GapProfile {
        objective,
        values,
        r_star: best,
        optimal_arms,
        optimal_mask,
        gaps,
        a_max: feasible.a_max(),
        max_support: feasible.max_support(),
        num_channels: scenario.num_channels(),
        b_min: None,
    };
    if objective == Objective::O2 && profile.gaps.is_some() {
        profile.b_min = Some(compute_b_min(&profile, feasible, scenario.rate())?);
    }
    Ok(profile)
}

/// `B_min = min over arms and their powered channels of B_i(a_i)`, where
/// `f_i(a_i, B_i(a_i)) = δ_min / (2L)`.
pub fn compute_b_min(profile: &GapProfile, feasible: &FeasibleSet, rate: &RateFunction) -> Result<f64, OracleError> {
    let gaps = profile.gaps.ok_or(OracleError::UndefinedGap(profile.objective))?;
    let target = gaps.delta_min / (2.0 * profile.max_support as f64);
    let mut seen = vec![false; feasible.num_vars()];
    let mut b_min = f64::INFINITY;
    for k in 0..feasible.len() {
        for slot in feasible.slots(k) {
            if std::mem::replace(&mut seen[slot.var], true) {
                continue;
            }
            b_min = b_min.min(level_threshold(rate, slot.channel, slot.power, target)?);
        }
    }
    Ok(b_min)
}

/// Solves `f(a, x) = target` for `x`, by closed form when available.
pub fn level_threshold(rate: &RateFunction, channel: usize, power: PowerMw, target: f64) -> Result<f64, OracleError> {
    match rate.inverse(channel, power, target) {
        Some(x) if x.is_finite() && x >= 0.0 => Ok(x),
        Some(_) => Err(OracleError::Unsolvable { channel, power, target }),
        None => bisect_level_threshold(rate, channel, power, target),
    }
}

/// Bisection on `[0, x_hi]`, growing `x_hi` geometrically until it brackets.
pub fn bisect_level_threshold(
    rate: &RateFunction,
    channel: usize,
    power: PowerMw,
    target: f64,
) -> Result<f64, OracleError> {
    let unsolvable = OracleError::Unsolvable { channel, power, target };
    if !(target.is_finite() && target >= 0.0) || power == 0 {
        return Err(unsolvable);
    }
    let f = |x: f64| rate.eval(channel, power, x);
    let mut hi = 1.0;
    while f(hi) < target {
        hi *= 2.0;
        if hi > 1e15 {
            return Err(unsolvable);
        }
    }
    let mut lo = 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-12 * f64::EPSILON {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Expected-regret bound of CWF1:
/// `[4 a_max² L² (L+1) N ln n / Δ_min² + N + (π²/3) L N] · Δ_max`.
pub fn cwf1_regret_bound(a_max: f64, l: usize, n_channels: usize, delta_min: f64, delta_max: f64, n: u64) -> f64 {
    cwf1_regret_bound_at_log(a_max, l, n_channels, delta_min, delta_max, (n.max(1) as f64).ln())
}

/// [`cwf1_regret_bound`] with `ln n` supplied directly.
pub fn cwf1_regret_bound_at_log(a_max: f64, l: usize, n_channels: usize, delta_min: f64, delta_max: f64, ln_n: f64) -> f64 {
    let (l, nc) = (l as f64, n_channels as f64);
    let log_term = 4.0 * a_max * a_max * l * l * (l + 1.0) * nc * ln_n / (delta_min * delta_min);
    (log_term + nc + PI * PI / 3.0 * l * nc) * delta_max
}

/// Bound on CWF2's expected number of non-optimal plays:
/// `N (L+1) ln n / B_min² + N + (π²/3) L N`.
pub fn cwf2_non_optimal_bound(b_min: f64, l: usize, n_channels: usize, n: u64) -> f64 {
    cwf2_non_optimal_bound_at_log(b_min, l, n_channels, (n.max(1) as f64).ln())
}

/// [`cwf2_non_optimal_bound`] with `ln n` supplied directly.
pub fn cwf2_non_optimal_bound_at_log(b_min: f64, l: usize, n_channels: usize, ln_n: f64) -> f64 {
    let (l, nc) = (l as f64, n_channels as f64);
    nc * (l + 1.0) * ln_n / (b_min * b_min) + nc + PI * PI / 3.0 * l * nc
}

/// True iff some O1-optimal arm strictly beats every non-O1-optimal arm in
/// pseudo-rate, which lets CWF2 serve the O1 objective.
pub fn pseudo_rate_separates(o1: &GapProfile, o2: &GapProfile) -> bool {
    assert_eq!(o1.values.len(), o2.values.len(), "profiles over different feasible sets");
    o1.optimal_arms.iter().any(|&star| {
        (0..o1.values.len())
            .filter(|&a| !o1.is_optimal(a))
            .all(|a| o2.values[star] > o2.values[a])
    })
}

/// Both objectives solved on one feasible set.
#[derive(Debug, Clone, PartialEq)]
pub struct Genie {
    pub o1: GapProfile,
    pub o2: GapProfile,
}

impl Genie {
    pub fn solve(scenario: &Scenario, feasible: &FeasibleSet) -> Result<Self, OracleError> {
        Ok(Self {
            o1: solve(scenario, feasible, Objective::O1)?,
            o2: solve(scenario, feasible, Objective::O2)?,
        })
    }

    pub fn profile(&self, objective: Objective) -> &GapProfile {
        match objective {
            Objective::O1 => &self.o1,
            Objective::O2 => &self.o2,
        }
    }

    pub fn pseudo_rate_separates(&self) -> bool {
        pseudo_rate_separates(&self.o1, &self.o2)
    }

    /// Regret bound for CWF2 under O1 when the pseudo-rate separates the O1 optimum.
    pub fn cwf2_regret_bound(&self, n: u64) -> Option<f64> {
        if !self.pseudo_rate_separates() {
            return None;
        }
        Some(self.o2.cwf2_non_optimal_bound(n)? * self.o1.gaps?.delta_max)
    }
}
