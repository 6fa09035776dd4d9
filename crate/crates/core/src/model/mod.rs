//! Channels, power allocations, feasible sets and rate functions.

mod feasible;
mod rate;

use std::fmt;

use thiserror::Error;

use crate::channels::ChannelDistribution;

pub use feasible::{FeasibleSet, Slot};
pub use rate::{validate_subadditivity, Curve, RateFunction, SubadditivityReport, TabulatedRate};

/// Power in integer milliwatts.
pub type PowerMw = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("a scenario needs at least one channel")]
    NoChannels,
    #[error("channel {0} has no nonzero power levels")]
    EmptyLevelSet(usize),
    #[error("channel {0} lists a zero power level; zero is implicit")]
    ZeroLevel(usize),
    #[error("expected {expected} channel laws, got {got}")]
    LawCount { expected: usize, got: usize },
    #[error("total power {total_mw} mW is below every channel's smallest level ({min_level_mw} mW)")]
    BudgetTooSmall { total_mw: PowerMw, min_level_mw: PowerMw },
    #[error("tabulated rate function has no curve for channel {channel} at {power} mW")]
    MissingRateTable { channel: usize, power: PowerMw },
    #[error("invalid rate curve: {0}")]
    InvalidCurve(String),
    #[error("feasible set is empty")]
    EmptyFeasibleSet,
}

/// One power allocation (an arm): a level per channel, 0 meaning unused.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PowerAllocation {
    levels: Vec<PowerMw>,
}

impl PowerAllocation {
    pub fn new(levels: Vec<PowerMw>) -> Self {
        Self { levels }
    }

    pub fn levels(&self) -> &[PowerMw] {
        &self.levels
    }

    pub fn num_channels(&self) -> usize {
        self.levels.len()
    }

    /// Channels receiving nonzero power.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0)
            .map(|(i, _)| i)
    }

    pub fn support_size(&self) -> usize {
        self.levels.iter().filter(|&&p| p != 0).count()
    }

    pub fn total_power(&self) -> u64 {
        self.levels.iter().map(|&p| u64::from(p)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(|&p| p == 0)
    }
}

impl fmt::Display for PowerAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A validated problem instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    power_levels: Vec<Vec<PowerMw>>,
    total_power_mw: PowerMw,
    rate: RateFunction,
    laws: Vec<ChannelDistribution>,
    include_zero_allocation: bool,
}

impl Scenario {
    /// Level sets are sorted and deduplicated.
    pub fn new(
        power_levels: Vec<Vec<PowerMw>>,
        total_power_mw: PowerMw,
        rate: RateFunction,
        laws: Vec<ChannelDistribution>,
        include_zero_allocation: bool,
    ) -> Result<Self, ModelError> {
        if power_levels.is_empty() {
            return Err(ModelError::NoChannels);
        }
        let mut power_levels = power_levels;
        for (i, set) in power_levels.iter_mut().enumerate() {
            if set.is_empty() {
                return Err(ModelError::EmptyLevelSet(i));
            }
            if set.contains(&0) {
                return Err(ModelError::ZeroLevel(i));
            }
            set.sort_unstable();
            set.dedup();
        }
        if laws.len() != power_levels.len() {
            return Err(ModelError::LawCount {
                expected: power_levels.len(),
                got: laws.len(),
            });
        }
        let min_level_mw = power_levels.iter().map(|s| s[0]).min().unwrap_or(0);
        if total_power_mw < min_level_mw {
            return Err(ModelError::BudgetTooSmall {
                total_mw: total_power_mw,
                min_level_mw,
            });
        }
        rate.check_levels(&power_levels)?;
        Ok(Self {
            power_levels,
            total_power_mw,
            rate,
            laws,
            include_zero_allocation,
        })
    }

    pub fn num_channels(&self) -> usize {
        self.power_levels.len()
    }

    /// `B_i`, the sorted nonzero levels of channel `i`.
    pub fn levels(&self, channel: usize) -> &[PowerMw] {
        &self.power_levels[channel]
    }

    pub fn power_levels(&self) -> &[Vec<PowerMw>] {
        &self.power_levels
    }

    pub fn total_power_mw(&self) -> PowerMw {
        self.total_power_mw
    }

    pub fn rate(&self) -> &RateFunction {
        &self.rate
    }

    pub fn laws(&self) -> &[ChannelDistribution] {
        &self.laws
    }

    pub fn include_zero_allocation(&self) -> bool {
        self.include_zero_allocation
    }

    /// Total number of lifted `(channel, level)` variables, `Σ|B_i|`.
    pub fn num_level_variables(&self) -> usize {
        self.power_levels.iter().map(Vec::len).sum()
    }
}

/// Sum rate of one round: `Σ_{i ∈ support} f_i(a_i, x_i)`.
pub fn realized_reward(rate: &RateFunction, arm: &PowerAllocation, gains: &[f64]) -> f64 {
    debug_assert_eq!(arm.num_channels(), gains.len());
    debug_assert!(gains.iter().all(|x| (0.0..=1.0).contains(x)));
    arm.support()
        .map(|i| rate.eval(i, arm.levels[i], gains[i]))
        .sum()
}
