//! Combinatorial water-filling on empirical gain means.
//!
//! Only `x̄_i` and `m_i` are stored, `2N` numbers in total. The index of a
//! level pushes both the estimate and the confidence radius through the rate
//! function: `f_i(b, x̄_i) + f_i(b, √((L+1) ln n / m_i))`.

use super::{
    check_feedback, confidence_radius, initialization_playlist, ArmSelector, Observation, Policy, PolicyError,
    PolicyKind, PolicyOptions, PolicySummary,
};
use crate::model::{FeasibleSet, PowerMw, Scenario};

pub struct Cwf2<'a> {
    scenario: &'a Scenario,
    feasible: &'a FeasibleSet,
    l: usize,
    x_bar: Vec<f64>,
    m: Vec<u64>,
    init: Vec<usize>,
    selector: ArmSelector,
    scratch: Vec<f64>,
    /// (channel, power) of every lifted variable.
    vars: Vec<(usize, PowerMw)>,
}

impl<'a> Cwf2<'a> {
    pub fn new(scenario: &'a Scenario, feasible: &'a FeasibleSet, options: PolicyOptions) -> Result<Self, PolicyError> {
        let init = initialization_playlist(feasible)?;
        let n = scenario.num_channels();
        let mut vars = vec![(0, 0); feasible.num_vars()];
        for i in 0..n {
            for (j, &p) in scenario.levels(i).iter().enumerate() {
                vars[feasible.var_index(i, j)] = (i, p);
            }
        }
        Ok(Self {
            scenario,
            feasible,
            l: options.l_override.unwrap_or(feasible.max_support()),
            x_bar: vec![0.0; n],
            m: vec![0; n],
            init,
            selector: ArmSelector::new(options.argmax, scenario),
            scratch: vec![0.0; feasible.num_vars()],
            vars,
        })
    }

    pub fn with_statistics(
        scenario: &'a Scenario,
        feasible: &'a FeasibleSet,
        options: PolicyOptions,
        x_bar: Vec<f64>,
        m: Vec<u64>,
    ) -> Result<Self, PolicyError> {
        let mut p = Self::new(scenario, feasible, options)?;
        assert_eq!(x_bar.len(), p.x_bar.len());
        assert_eq!(m.len(), p.m.len());
        p.x_bar = x_bar;
        p.m = m;
        Ok(p)
    }

    pub fn exploration_constant(&self) -> usize {
        self.l
    }

    pub fn gain_means(&self) -> &[f64] {
        &self.x_bar
    }

    pub fn counts(&self) -> &[u64] {
        &self.m
    }

    pub fn index(&self, k: usize, round: u64) -> f64 {
        let ln_n = (round as f64).ln();
        let rate = self.scenario.rate();
        self.feasible
            .slots(k)
            .iter()
            .map(|s| {
                let c = confidence_radius(self.l, ln_n, self.m[s.channel]);
                rate.eval(s.channel, s.power, self.x_bar[s.channel]) + rate.eval(s.channel, s.power, c)
            })
            .sum()
    }
}

impl Policy for Cwf2<'_> {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Cwf2
    }

    fn initialization(&self) -> &[usize] {
        &self.init
    }

    fn select(&mut self, round: u64) -> usize {
        let ln_n = (round as f64).ln();
        let rate = self.scenario.rate();
        for (score, &(ch, p)) in self.scratch.iter_mut().zip(&self.vars) {
            let c = confidence_radius(self.l, ln_n, self.m[ch]);
            *score = rate.eval(ch, p, self.x_bar[ch]) + rate.eval(ch, p, c);
        }
        self.selector.best(self.feasible, &self.scratch)
    }

    fn update(&mut self, arm: usize, observations: &[Observation]) -> Result<(), PolicyError> {
        check_feedback(self.feasible, arm, observations)?;
        for obs in observations {
            let i = obs.channel;
            self.m[i] += 1;
            self.x_bar[i] += (obs.gain - self.x_bar[i]) / self.m[i] as f64;
        }
        Ok(())
    }

    fn summary(&self) -> PolicySummary {
        PolicySummary {
            policy: PolicyKind::Cwf2,
            state_size: self.x_bar.len() + self.m.len(),
            counts: self.m.clone(),
            means: self.x_bar.clone(),
        }
    }
}
