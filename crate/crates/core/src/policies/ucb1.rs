//! UCB1 with one arm per feasible allocation.

use super::{check_feedback, Observation, Policy, PolicyError, PolicyKind, PolicySummary};
use crate::model::{FeasibleSet, Scenario};

pub struct Ucb1<'a> {
    scenario: &'a Scenario,
    feasible: &'a FeasibleSet,
    means: Vec<f64>,
    counts: Vec<u64>,
    init: Vec<usize>,
}

impl<'a> Ucb1<'a> {
    pub fn new(scenario: &'a Scenario, feasible: &'a FeasibleSet) -> Self {
        Self {
            scenario,
            feasible,
            means: vec![0.0; feasible.len()],
            counts: vec![0; feasible.len()],
            init: (0..feasible.len()).collect(),
        }
    }

    pub fn index(&self, k: usize, round: u64) -> f64 {
        if self.counts[k] == 0 {
            return f64::INFINITY;
        }
        self.means[k] + (2.0 * (round as f64).ln() / self.counts[k] as f64).sqrt()
    }
}

impl Policy for Ucb1<'_> {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Ucb1
    }

    fn initialization(&self) -> &[usize] {
        &self.init
    }

    fn select(&mut self, round: u64) -> usize {
        let two_ln_n = 2.0 * (round as f64).ln();
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (k, (&mean, &m)) in self.means.iter().zip(&self.counts).enumerate() {
            let score = if m == 0 {
                f64::INFINITY
            } else {
                mean + (two_ln_n / m as f64).sqrt()
            };
            if score > best_score {
                best_score = score;
                best = k;
            }
        }
        best
    }

    fn update(&mut self, arm: usize, observations: &[Observation]) -> Result<(), PolicyError> {
        check_feedback(self.feasible, arm, observations)?;
        let rate = self.scenario.rate();
        let reward: f64 = observations
            .iter()
            .zip(self.feasible.slots(arm))
            .map(|(o, s)| rate.eval(s.channel, s.power, o.gain))
            .sum();
        self.counts[arm] += 1;
        self.means[arm] += (reward - self.means[arm]) / self.counts[arm] as f64;
        Ok(())
    }

    fn summary(&self) -> PolicySummary {
        PolicySummary {
            policy: PolicyKind::Ucb1,
            state_size: 2 * self.means.len(),
            counts: self.counts.clone(),
            means: self.means.clone(),
        }
    }
}
