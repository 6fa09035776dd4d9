//! Learning with linear rewards over the lifted `(channel, level)` variables.
//!
//! An arm is the indicator vector of its `(i, a_i)` pairs. A play observes
//! only the pairs it uses, so each pair keeps its own mean and counter, and
//! the exploration constant is the largest number of pairs in one arm.

use super::{
    check_feedback, confidence_radius, ArmSelector, Observation, Policy, PolicyError, PolicyKind, PolicyOptions,
    PolicySummary,
};
use crate::model::{FeasibleSet, Scenario};

pub struct Llr<'a> {
    scenario: &'a Scenario,
    feasible: &'a FeasibleSet,
    l: usize,
    y_bar: Vec<f64>,
    m: Vec<u64>,
    init: Vec<usize>,
    selector: ArmSelector,
    scratch: Vec<f64>,
}

/// Greedy cover of every variable that some arm uses: repeatedly take the
/// first arm covering the most variables not yet seen.
pub fn cover_playlist(feasible: &FeasibleSet) -> Vec<usize> {
    let mut covered = vec![true; feasible.num_vars()];
    for k in 0..feasible.len() {
        for s in feasible.slots(k) {
            covered[s.var] = false;
        }
    }
    let mut playlist = Vec::new();
    loop {
        let mut best = None;
        let mut best_gain = 0;
        for k in 0..feasible.len() {
            let gain = feasible.slots(k).iter().filter(|s| !covered[s.var]).count();
            if gain > best_gain {
                best_gain = gain;
                best = Some(k);
            }
        }
        let Some(k) = best else { break };
        for s in feasible.slots(k) {
            covered[s.var] = true;
        }
        playlist.push(k);
    }
    playlist
}

impl<'a> Llr<'a> {
    pub fn new(scenario: &'a Scenario, feasible: &'a FeasibleSet, options: PolicyOptions) -> Result<Self, PolicyError> {
        super::initialization_playlist(feasible)?;
        Ok(Self {
            scenario,
            feasible,
            l: options.l_override.unwrap_or(feasible.max_support()),
            y_bar: vec![0.0; feasible.num_vars()],
            m: vec![0; feasible.num_vars()],
            init: cover_playlist(feasible),
            selector: ArmSelector::new(options.argmax, scenario),
            scratch: vec![0.0; feasible.num_vars()],
        })
    }
}

impl Policy for Llr<'_> {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Llr
    }

    fn initialization(&self) -> &[usize] {
        &self.init
    }

    fn select(&mut self, round: u64) -> usize {
        let ln_n = (round as f64).ln();
        for ((score, &y), &m) in self.scratch.iter_mut().zip(&self.y_bar).zip(&self.m) {
            *score = y + confidence_radius(self.l, ln_n, m);
        }
        self.selector.best(self.feasible, &self.scratch)
    }

    fn update(&mut self, arm: usize, observations: &[Observation]) -> Result<(), PolicyError> {
        check_feedback(self.feasible, arm, observations)?;
        let rate = self.scenario.rate();
        for (o, s) in observations.iter().zip(self.feasible.slots(arm)) {
            let y = rate.eval(s.channel, s.power, o.gain);
            self.m[s.var] += 1;
            self.y_bar[s.var] += (y - self.y_bar[s.var]) / self.m[s.var] as f64;
        }
        Ok(())
    }

    fn summary(&self) -> PolicySummary {
        PolicySummary {
            policy: PolicyKind::Llr,
            state_size: self.y_bar.len() + self.m.len(),
            counts: self.m.clone(),
            means: self.y_bar.clone(),
        }
    }
}
