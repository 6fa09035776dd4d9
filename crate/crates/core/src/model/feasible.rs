use super::{ModelError, PowerAllocation, PowerMw, Scenario};

/// One powered channel of an arm, with the lifted-variable index of
/// `(channel, level)` precomputed for the policies' hot loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub channel: usize,
    /// Index into `B_channel`.
    pub level: usize,
    pub power: PowerMw,
    /// Flattened `(channel, level)` index in `0..Σ|B_i|`.
    pub var: usize,
}

/// All feasible allocations in lexicographic order.
///
/// Arms are referred to everywhere by their index in this list.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    num_channels: usize,
    arms: Vec<PowerAllocation>,
    slots: Vec<Vec<Slot>>,
    var_offsets: Vec<usize>,
    num_vars: usize,
    max_support: usize,
}

impl FeasibleSet {
    /// Enumerates every level vector with `a_i ∈ {0} ∪ B_i` and
    /// `Σ a_i ≤ P_total`.
    pub fn enumerate(scenario: &Scenario) -> Result<Self, ModelError> {
        let n = scenario.num_channels();
        let budget = u64::from(scenario.total_power_mw());
        let choices: Vec<Vec<PowerMw>> = (0..n)
            .map(|i| {
                let mut c = vec![0];
                c.extend_from_slice(scenario.levels(i));
                c
            })
            .collect();

        let mut arms = Vec::new();
        let mut current = Vec::with_capacity(n);
        collect(&choices, budget, &mut current, &mut arms);
        if !scenario.include_zero_allocation() {
            arms.retain(|a| !a.is_zero());
        }
        if arms.is_empty() {
            return Err(ModelError::EmptyFeasibleSet);
        }

        let mut var_offsets = Vec::with_capacity(n);
        let mut num_vars = 0;
        for i in 0..n {
            var_offsets.push(num_vars);
            num_vars += scenario.levels(i).len();
        }
        let slots = arms
            .iter()
            .map(|arm| {
                arm.support()
                    .map(|channel| {
                        let power = arm.levels()[channel];
                        let level = scenario
                            .levels(channel)
                            .binary_search(&power)
                            .expect("enumerated level belongs to B_i");
                        Slot {
                            channel,
                            level,
                            power,
                            var: var_offsets[channel] + level,
                        }
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>();
        let max_support = slots.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            num_channels: n,
            arms,
            slots,
            var_offsets,
            num_vars,
            max_support,
        })
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    pub fn arms(&self) -> &[PowerAllocation] {
        &self.arms
    }

    pub fn arm(&self, index: usize) -> &PowerAllocation {
        &self.arms[index]
    }

    pub fn slots(&self, index: usize) -> &[Slot] {
        &self.slots[index]
    }

    /// `L = max_a |A_a|`.
    pub fn max_support(&self) -> usize {
        self.max_support
    }

    /// Number of lifted `(channel, level)` variables, `Σ|B_i|`.
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn var_index(&self, channel: usize, level: usize) -> usize {
        self.var_offsets[channel] + level
    }

    /// Channel owning lifted variable `var`.
    pub fn var_channel(&self, var: usize) -> usize {
        self.var_offsets.partition_point(|&o| o <= var) - 1
    }

    /// Largest single-channel power over all arms (`a_max`).
    pub fn a_max(&self) -> PowerMw {
        self.arms
            .iter()
            .flat_map(|a| a.levels().iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn index_of(&self, arm: &PowerAllocation) -> Option<usize> {
        self.arms.binary_search(arm).ok()
    }
}

// Depth-first over channels in order, smallest level first, which yields
// lexicographic order directly.
fn collect(
    choices: &[Vec<PowerMw>],
    budget: u64,
    current: &mut Vec<PowerMw>,
    out: &mut Vec<PowerAllocation>,
) {
    let depth = current.len();
    if depth == choices.len() {
        out.push(PowerAllocation::new(current.clone()));
        return;
    }
    for &p in &choices[depth] {
        let p64 = u64::from(p);
        if p64 > budget {
            break;
        }
        current.push(p);
        collect(choices, budget - p64, current, out);
        current.pop();
    }
}
