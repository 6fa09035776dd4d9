//! Multiple-choice knapsack argmax over separable arm scores.
//!
//! Each channel picks one option from `{0} ∪ B_i`, and the powers share the
//! budget. Powers are measured in units of their common divisor, so the table
//! has `N × (P_total / g + 1)` cells.

use crate::model::{FeasibleSet, PowerAllocation, PowerMw, Scenario};

#[derive(Debug, Clone)]
pub struct KnapsackSolver {
    /// Per channel: (power, units, level index) for every nonzero option.
    options: Vec<Vec<(PowerMw, usize, usize)>>,
    budget_units: usize,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl KnapsackSolver {
    pub fn new(scenario: &Scenario) -> Self {
        let g = scenario
            .power_levels()
            .iter()
            .flatten()
            .fold(scenario.total_power_mw(), |acc, &p| gcd(acc, p))
            .max(1);
        let options = scenario
            .power_levels()
            .iter()
            .map(|levels| {
                levels
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| (p, (p / g) as usize, j))
                    .collect()
            })
            .collect();
        Self {
            options,
            budget_units: (scenario.total_power_mw() / g) as usize,
        }
    }

    /// Best allocation for the given per-variable scores, or `None` when the
    /// winner is not in `feasible` (the excluded all-zero arm).
    pub fn best_arm(&self, feasible: &FeasibleSet, var_scores: &[f64]) -> Option<usize> {
        let n = self.options.len();
        let width = self.budget_units + 1;
        // best[i * width + b]: best score of channels i.. with b units left
        let mut best = vec![0.0f64; (n + 1) * width];
        for i in (0..n).rev() {
            for b in 0..width {
                let mut v = best[(i + 1) * width + b];
                for &(_, u, j) in &self.options[i] {
                    if u <= b {
                        let cand = var_scores[feasible.var_index(i, j)] + best[(i + 1) * width + b - u];
                        if cand > v {
                            v = cand;
                        }
                    }
                }
                best[i * width + b] = v;
            }
        }
        // Walk forward taking the lexicographically smallest choice that
        // still attains the optimum.
        let mut levels = vec![0; n];
        let mut b = self.budget_units;
        for i in 0..n {
            let target = best[i * width + b];
            let tol = 1e-12 * target.abs().max(1.0);
            if best[(i + 1) * width + b] >= target - tol {
                continue;
            }
            for &(p, u, j) in &self.options[i] {
                if u <= b && var_scores[feasible.var_index(i, j)] + best[(i + 1) * width + b - u] >= target - tol {
                    levels[i] = p;
                    b -= u;
                    break;
                }
            }
        }
        feasible.index_of(&PowerAllocation::new(levels))
    }
}
