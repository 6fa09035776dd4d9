//! Combinatorial water-filling with per-level rate statistics.
//!
//! Each observed gain `x_i` updates the empirical mean of `f_i(b, x_i)` for
//! every level `b ∈ B_i`, so the state is `Σ|B_i|` means plus `N` counters.

use super::{
    check_feedback, confidence_radius, initialization_playlist, ArmSelector, Observation, Policy, PolicyError,
    PolicyKind, PolicyOptions, PolicySummary,
};
use crate::model::{FeasibleSet, Scenario};

pub struct Cwf1<'a> {
    scenario: &'a Scenario,
    feasible: &'a FeasibleSet,
    l: usize,
    /// `ȳ_{i,b}`, indexed by the feasible set's variable index.
    y_bar: Vec<f64>,
    /// `m_i`, observations per channel.
    m: Vec<u64>,
    init: Vec<usize>,
    selector: ArmSelector,
    scratch: Vec<f64>,
    var_channel: Vec<usize>,
}

impl<'a> Cwf1<'a> {
    pub fn new(scenario: &'a Scenario, feasible: &'a FeasibleSet, options: PolicyOptions) -> Result<Self, PolicyError> {
        let init = initialization_playlist(feasible)?;
        let n_vars = feasible.num_vars();
        let var_channel = (0..n_vars).map(|v| feasible.var_channel(v)).collect();
        Ok(Self {
            scenario,
            feasible,
            l: options.l_override.unwrap_or(feasible.max_support()),
            y_bar: vec![0.0; n_vars],
            m: vec![0; scenario.num_channels()],
            init,
            selector: ArmSelector::new(options.argmax, scenario),
            scratch: vec![0.0; n_vars],
            var_channel,
        })
    }

    /// Starts from given statistics instead of an empty state.
    pub fn with_statistics(
        scenario: &'a Scenario,
        feasible: &'a FeasibleSet,
        options: PolicyOptions,
        y_bar: Vec<f64>,
        m: Vec<u64>,
    ) -> Result<Self, PolicyError> {
        let mut p = Self::new(scenario, feasible, options)?;
        assert_eq!(y_bar.len(), p.y_bar.len());
        assert_eq!(m.len(), p.m.len());
        p.y_bar = y_bar;
        p.m = m;
        Ok(p)
    }

    pub fn exploration_constant(&self) -> usize {
        self.l
    }

    pub fn rate_means(&self) -> &[f64] {
        &self.y_bar
    }

    pub fn counts(&self) -> &[u64] {
        &self.m
    }

    /// Index of arm `k` at round `round`.
    pub fn index(&self, k: usize, round: u64) -> f64 {
        let ln_n = (round as f64).ln();
        self.feasible
            .slots(k)
            .iter()
            .map(|s| self.y_bar[s.var] + confidence_radius(self.l, ln_n, self.m[s.channel]))
            .sum()
    }
}

impl Policy for Cwf1<'_> {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Cwf1
    }

    fn initialization(&self) -> &[usize] {
        &self.init
    }

    fn select(&mut self, round: u64) -> usize {
        let ln_n = (round as f64).ln();
        for (v, score) in self.scratch.iter_mut().enumerate() {
            let ch = self.var_channel[v];
            *score = self.y_bar[v] + confidence_radius(self.l, ln_n, self.m[ch]);
        }
        self.selector.best(self.feasible, &self.scratch)
    }

    fn update(&mut self, arm: usize, observations: &[Observation]) -> Result<(), PolicyError> {
        check_feedback(self.feasible, arm, observations)?;
        let rate = self.scenario.rate();
        for obs in observations {
            let i = obs.channel;
            let next = (self.m[i] + 1) as f64;
            for (j, &p) in self.scenario.levels(i).iter().enumerate() {
                let v = self.feasible.var_index(i, j);
                let y = rate.eval(i, p, obs.gain);
                self.y_bar[v] += (y - self.y_bar[v]) / next;
            }
            self.m[i] += 1;
        }
        Ok(())
    }

    fn summary(&self) -> PolicySummary {
        PolicySummary {
            policy: PolicyKind::Cwf1,
            state_size: self.y_bar.len() + self.m.len(),
            counts: self.m.clone(),
            means: self.y_bar.clone(),
        }
    }
}
