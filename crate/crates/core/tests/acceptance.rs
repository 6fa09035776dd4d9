//! Acceptance checks for the bundled scenarios.
//!
//! Prints one line per criterion and exits nonzero when a hard criterion
//! fails. Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test --test acceptance -- 1 2`.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestCaseError, TestRunner};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stochastic_waterfill::channels::{ChannelDistribution, DiscreteLaw, GainRng};
use stochastic_waterfill::config::ConfigFile;
use stochastic_waterfill::harness::{self, aggregate, compare_bound, AggregateTrace, BoundedMetric, RunConfig};
use stochastic_waterfill::model::{
    validate_subadditivity, FeasibleSet, PowerAllocation, PowerMw, RateFunction, Scenario,
};
use stochastic_waterfill::oracle::{o1_value, o2_value, solve, Genie, Objective, TIE_TOLERANCE};
use stochastic_waterfill::policies::{exhaustive_argmax, Cwf1, KnapsackSolver, Observation, Policy, PolicyKind, PolicyOptions};

const RUNS: usize = 20;
const LONG_HORIZON: u64 = 1_000_000;
const SHORT_HORIZON: u64 = 100_000;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    /// Reported, never fatal.
    SoftPass,
    SoftFail,
}

struct Outcome {
    status: Status,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            status: Status::Pass,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
        if !ok {
            self.status = Status::Fail;
        }
    }

    fn note(&mut self, line: String) {
        self.lines.push(format!("     {line}"));
    }
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

struct Bundle {
    config: ConfigFile,
    scenario: Scenario,
    feasible: FeasibleSet,
    genie: Genie,
}

fn load(name: &str) -> Bundle {
    let config = ConfigFile::load(&config_path(name)).expect("bundled config parses");
    let scenario = config.build_scenario().expect("bundled scenario builds");
    let feasible = FeasibleSet::enumerate(&scenario).expect("feasible set");
    let genie = Genie::solve(&scenario, &feasible).expect("oracle");
    Bundle {
        config,
        scenario,
        feasible,
        genie,
    }
}

fn o1_bundle() -> &'static Bundle {
    static B: OnceLock<Bundle> = OnceLock::new();
    B.get_or_init(|| load("rayleigh_o1.toml"))
}

fn o2_bundle() -> &'static Bundle {
    static B: OnceLock<Bundle> = OnceLock::new();
    B.get_or_init(|| load("rayleigh_o2.toml"))
}

fn simulate(b: &Bundle, policy: PolicyKind, horizon: u64) -> AggregateTrace {
    let mut cfg: RunConfig = b.config.run_config(policy);
    cfg.horizon = horizon;
    cfg.runs = RUNS;
    let traces = harness::run(&b.scenario, &b.feasible, &b.genie, &cfg).expect("simulation");
    aggregate(&traces).expect("aggregate")
}

/// CWF2 on the pseudo-rate scenario to 10⁶ rounds, shared by two criteria.
fn cwf2_long() -> &'static AggregateTrace {
    static T: OnceLock<AggregateTrace> = OnceLock::new();
    T.get_or_init(|| simulate(o2_bundle(), PolicyKind::Cwf2, LONG_HORIZON))
}

fn cwf1_long() -> &'static AggregateTrace {
    static T: OnceLock<AggregateTrace> = OnceLock::new();
    T.get_or_init(|| simulate(o1_bundle(), PolicyKind::Cwf1, LONG_HORIZON))
}

// ---------------------------------------------------------------- 1

fn brute_force_count(levels: &[Vec<PowerMw>], budget: PowerMw) -> (usize, usize) {
    let choices: Vec<Vec<PowerMw>> = levels
        .iter()
        .map(|b| std::iter::once(0).chain(b.iter().copied()).collect())
        .collect();
    let total: usize = choices.iter().map(Vec::len).product();
    let mut count = 0;
    let mut max_support = 0;
    for mut code in 0..total {
        let mut sum = 0;
        let mut support = 0;
        for c in &choices {
            let p = c[code % c.len()];
            code /= c.len();
            sum += p;
            support += usize::from(p != 0);
        }
        if sum <= budget {
            count += 1;
            max_support = max_support.max(support);
        }
    }
    (count, max_support)
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    let cfg = ConfigFile::load(&config_path("rayleigh_o2.toml")).unwrap();
    let scenario = cfg.build_scenario().unwrap();
    let start = Instant::now();
    let feasible = FeasibleSet::enumerate(&scenario).unwrap();
    let elapsed = start.elapsed();
    let (brute, brute_l) = brute_force_count(scenario.power_levels(), scenario.total_power_mw());
    out.check(feasible.len() == 140, format!("|F| = {} (expected 140)", feasible.len()));
    out.check(brute == feasible.len(), format!("brute-force grid filter counts {brute}"));
    out.check(
        brute_l == feasible.max_support() && feasible.max_support() == 4,
        format!("L = {} (brute force {brute_l})", feasible.max_support()),
    );
    out.check(elapsed < Duration::from_secs(1), format!("enumeration took {elapsed:?} (< 1 s)"));
    out
}

// ---------------------------------------------------------------- 2

struct Draw(ChaCha8Rng);

impl Draw {
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }
}

fn random_scenario(draw: &mut Draw) -> Scenario {
    let n = 1 + draw.below(3) as usize;
    let mut levels = Vec::new();
    let mut laws = Vec::new();
    for _ in 0..n {
        let mut set = BTreeSet::new();
        let k = 1 + draw.below(3);
        while set.len() < k as usize {
            set.insert(5 * (1 + draw.below(8)) as PowerMw);
        }
        levels.push(set.into_iter().collect::<Vec<_>>());
        let support = 1 + draw.below(4) as usize;
        let weights: Vec<f64> = (0..support).map(|_| 0.05 + draw.unit()).collect();
        let total: f64 = weights.iter().sum();
        let points = weights.iter().map(|w| ((draw.unit() * 1000.0).round() / 1000.0, w / total)).collect();
        laws.push(ChannelDistribution::Discrete(DiscreteLaw::new(points).unwrap()));
    }
    let min: PowerMw = levels.iter().map(|l| l[0]).min().unwrap();
    let max_sum: PowerMw = levels.iter().map(|l| *l.last().unwrap()).sum();
    let budget = min + draw.below(u64::from(max_sum - min) + 1) as PowerMw;
    let include_zero = draw.below(4) != 0;
    Scenario::new(levels, budget, RateFunction::ShannonLog, laws, include_zero).unwrap()
}

/// Arm values straight from the support points, without the oracle module.
fn rescan_values(s: &Scenario, f: &FeasibleSet, objective: Objective) -> Vec<f64> {
    f.arms()
        .iter()
        .map(|arm| {
            let mut v = 0.0;
            for (i, &a) in arm.levels().iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let ChannelDistribution::Discrete(law) = &s.laws()[i] else {
                    unreachable!()
                };
                let a = f64::from(a);
                match objective {
                    Objective::O1 => {
                        v += law.points().iter().map(|&(x, p)| p * (1.0 + a * x).ln()).sum::<f64>();
                    }
                    Objective::O2 => {
                        let theta: f64 = law.points().iter().map(|&(x, p)| p * x).sum();
                        v += (1.0 + a * theta).ln();
                    }
                }
            }
            v
        })
        .collect()
}

fn rescan_argmax(values: &[f64]) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cutoff = best - TIE_TOLERANCE * best.abs().max(1.0);
    (0..values.len()).filter(|&k| values[k] >= cutoff).collect()
}

/// Compensated running sum.
#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

struct MonteCarlo {
    /// Per (channel, level): mean and variance of `ln(1 + a X)`.
    rate: Vec<Vec<(f64, f64)>>,
    /// Per channel: mean and variance of `X`.
    gain: Vec<(f64, f64)>,
    draws: f64,
}

fn monte_carlo(s: &Scenario, draws: u64, rng: &mut GainRng) -> MonteCarlo {
    let n = s.num_channels();
    let mut rate_sums = vec![vec![(Kahan::default(), Kahan::default()); 3]; n];
    let mut gain_sums = vec![(Kahan::default(), Kahan::default()); n];
    for _ in 0..draws {
        for i in 0..n {
            let x = s.laws()[i].sample_from_uniform(rng.uniform());
            gain_sums[i].0.add(x);
            gain_sums[i].1.add(x * x);
            for (j, &a) in s.levels(i).iter().enumerate() {
                let y = (1.0 + f64::from(a) * x).ln();
                rate_sums[i][j].0.add(y);
                rate_sums[i][j].1.add(y * y);
            }
        }
    }
    let d = draws as f64;
    let moments = |(s1, s2): (Kahan, Kahan)| {
        let m = s1.sum / d;
        (m, (s2.sum / d - m * m).max(0.0) * d / (d - 1.0))
    };
    MonteCarlo {
        rate: rate_sums.into_iter().map(|v| v.into_iter().map(moments).collect()).collect(),
        gain: gain_sums.into_iter().map(moments).collect(),
        draws: d,
    }
}

fn criterion_2() -> Outcome {
    const SCENARIOS: u64 = 50;
    const DRAWS: u64 = 1_000_000;
    let mut out = Outcome::new();
    let start = Instant::now();
    let mut draw = Draw(ChaCha8Rng::seed_from_u64(2));
    let mut compared = 0usize;
    let mut worst_z: f64 = 0.0;
    let mut exceed = Vec::new();
    let mut argmax_mismatch = Vec::new();
    for sc in 0..SCENARIOS {
        let s = random_scenario(&mut draw);
        let f = FeasibleSet::enumerate(&s).unwrap();
        let mc = monte_carlo(&s, DRAWS, &mut GainRng::for_run(1, sc));
        for objective in [Objective::O1, Objective::O2] {
            let profile = solve(&s, &f, objective).unwrap();
            let expected = rescan_argmax(&rescan_values(&s, &f, objective));
            if profile.optimal_arms != expected {
                argmax_mismatch.push(format!("scenario {sc} {objective}: {:?} vs {:?}", profile.optimal_arms, expected));
            }
        }
        for arm in f.arms() {
            let (mut est1, mut var1, mut est2, mut var2) = (0.0, 0.0, 0.0, 0.0);
            for i in arm.support() {
                let a = arm.levels()[i];
                let j = s.levels(i).binary_search(&a).unwrap();
                let (m, v) = mc.rate[i][j];
                est1 += m;
                var1 += v / mc.draws;
                let (xm, xv) = mc.gain[i];
                let a = f64::from(a);
                est2 += (1.0 + a * xm).ln();
                // delta method
                let slope = a / (1.0 + a * xm);
                var2 += slope * slope * xv / mc.draws;
            }
            for (value, est, var) in [(o1_value(&s, arm), est1, var1), (o2_value(&s, arm), est2, var2)] {
                compared += 1;
                let se = var.sqrt();
                // floating-point floor for degenerate laws
                let allowed = 3.0 * se + 1e-12 * value.abs().max(1.0);
                let diff = (value - est).abs();
                if se > 0.0 {
                    worst_z = worst_z.max(diff / se);
                }
                if diff > allowed {
                    exceed.push(format!("scenario {sc} arm {arm}: value {value} estimate {est} se {se}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    out.check(
        exceed.is_empty(),
        format!(
            "{compared} arm values within 3 standard errors of a 10⁶-draw estimate ({} outside, largest |z| = {worst_z:.2})",
            exceed.len()
        ),
    );
    for e in exceed.iter().take(5) {
        out.note(e.clone());
    }
    out.check(
        argmax_mismatch.is_empty(),
        format!("optimal sets equal an independent re-scan on {SCENARIOS} scenarios × 2 objectives"),
    );
    for e in argmax_mismatch.iter().take(5) {
        out.note(e.clone());
    }
    out.check(elapsed < Duration::from_secs(120), format!("runtime {elapsed:.1?} (< 2 min)"));
    out
}

// ---------------------------------------------------------------- 3

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    let b = o2_bundle();
    let trace = cwf2_long();
    let report = compare_bound(trace, BoundedMetric::NonOptimalPlays, |n| {
        b.genie.o2.cwf2_non_optimal_bound(n).expect("B_min defined")
    });
    out.check(
        !report.any_exceeded(),
        format!("mean T_non ≤ bound at all {} checkpoints", report.points.len()),
    );
    let rising: Vec<String> = report
        .points
        .windows(2)
        .filter(|w| w[1].ratio > w[0].ratio)
        .map(|w| format!("{}→{}", w[0].n, w[1].n))
        .collect();
    out.check(
        rising.is_empty(),
        format!("ratio T_non/bound decreases with n ({} of {} steps rise)", rising.len(), report.points.len() - 1),
    );
    for p in report.points.iter().filter(|p| [1_000, 10_000, 100_000, 1_000_000].contains(&p.n)) {
        out.note(format!("n = {:>7}: T_non = {:>10.1}, bound = {:.4e}, ratio = {:.3e}", p.n, p.empirical, p.bound, p.ratio));
    }
    let last = report.points.last().unwrap();
    out.check(last.ratio < 0.5, format!("ratio at n = 10⁶ is {:.3e} (< 0.5)", last.ratio));
    out
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    let b = o1_bundle();
    let trace = cwf1_long();
    let at5 = trace.at(SHORT_HORIZON).unwrap().regret_per_log_n();
    let at6 = trace.at(LONG_HORIZON).unwrap().regret_per_log_n();
    let change = (at6 - at5).abs() / at5;
    out.check(
        change <= 0.25,
        format!("regret/ln n: {at5:.2} at 10⁵, {at6:.2} at 10⁶ (change {:.1}% ≤ 25%)", 100.0 * change),
    );
    let report = compare_bound(trace, BoundedMetric::Regret, |n| {
        b.genie.o1.cwf1_regret_bound(n).expect("Δ_min defined")
    });
    out.check(
        !report.any_exceeded(),
        format!(
            "regret ≤ bound at all {} checkpoints (ratio at 10⁶ = {:.2e})",
            report.points.len(),
            report.points.last().unwrap().ratio
        ),
    );
    out
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    let b = o2_bundle();
    out.check(
        b.genie.pseudo_rate_separates(),
        "pseudo-rate optimum also separates the expected-rate optimum".to_string(),
    );
    let order = [PolicyKind::Cwf2, PolicyKind::Cwf1, PolicyKind::Llr, PolicyKind::Ucb1];
    let regrets: Vec<(PolicyKind, f64, f64)> = order
        .iter()
        .map(|&k| {
            let t = simulate(b, k, SHORT_HORIZON);
            let last = t.last();
            (k, last.regret_mean, last.regret_stderr)
        })
        .collect();
    let ordered = regrets.windows(2).all(|w| w[0].1 < w[1].1);
    let text = regrets
        .iter()
        .map(|(k, r, se)| format!("{k} {r:.1}±{se:.1}"))
        .collect::<Vec<_>>()
        .join(", ");
    out.check(ordered, format!("regret at 10⁵ ordered cwf2 < cwf1 < llr < ucb1: {text}"));
    out
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    let last = cwf2_long().last();
    let frac = last.t_non_mean / last.n as f64;
    out.check(
        frac < 0.01,
        format!("CWF2 T_non/n at 10⁶ = {:.4} (< 0.01), T_non = {:.0} ± {:.0}", frac, last.t_non_mean, last.t_non_stderr),
    );
    out
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let cases = [
        (o1_bundle(), Objective::O1, [20, 20, 20, 0]),
        (o2_bundle(), Objective::O2, [20, 20, 0, 20]),
    ];
    for (b, objective, expected) in cases {
        let p = b.genie.profile(objective);
        let found: Vec<String> = p.optimal_arms.iter().map(|&k| b.feasible.arm(k).to_string()).collect();
        let want = PowerAllocation::new(expected.to_vec());
        let hit = p.optimal_arms.iter().any(|&k| b.feasible.arm(k) == &want);
        out.check(
            hit,
            format!(
                "{} {objective} optimum {} (reference {want})",
                b.config.scenario.name.as_deref().unwrap_or("?"),
                found.join(" ")
            ),
        );
    }
    out.status = if out.status == Status::Pass {
        Status::SoftPass
    } else {
        Status::SoftFail
    };
    out
}

// ---------------------------------------------------------------- 8

fn property(out: &mut Outcome, name: &str, cases: u32, test: impl FnOnce(&mut TestRunner) -> Result<(), String>) {
    let mut runner = TestRunner::new_with_rng(
        ProptestConfig {
            cases,
            failure_persistence: None,
            ..ProptestConfig::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    match test(&mut runner) {
        Ok(()) => out.check(true, format!("{name} ({cases} cases)")),
        Err(e) => out.check(false, format!("{name}: {e}")),
    }
}

fn point_scenario(levels: Vec<Vec<PowerMw>>, budget: PowerMw, points: &[Vec<(f64, f64)>]) -> Scenario {
    let laws = points
        .iter()
        .map(|p| ChannelDistribution::Discrete(DiscreteLaw::new(p.clone()).unwrap()))
        .collect();
    Scenario::new(levels, budget, RateFunction::ShannonLog, laws, true).unwrap()
}

fn reference_levels() -> Vec<Vec<PowerMw>> {
    vec![vec![10, 20, 30], vec![10, 20, 30], vec![10, 20, 30, 40], vec![10, 20]]
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    let grid = FeasibleSet::enumerate(&point_scenario(reference_levels(), 60, &vec![vec![(0.5, 1.0)]; 4])).unwrap();
    let knap = KnapsackSolver::new(&point_scenario(reference_levels(), 60, &vec![vec![(0.5, 1.0)]; 4]));

    property(&mut out, "argmax is deterministic, first-index, and knapsack-equivalent", 256, |r| {
        r.run(&proptest::collection::vec(-2.0f64..2.0, 12), |scores| {
            let a = exhaustive_argmax(&grid, &scores);
            prop_assert_eq!(a, exhaustive_argmax(&grid, &scores));
            let value = |k: usize| grid.slots(k).iter().map(|s| scores[s.var]).sum::<f64>();
            let best = (0..grid.len()).map(value).fold(f64::NEG_INFINITY, f64::max);
            let first = (0..grid.len()).find(|&k| value(k) == best).unwrap();
            prop_assert_eq!(a, first);
            let k = knap.best_arm(&grid, &scores).unwrap();
            prop_assert!((value(k) - best).abs() < 1e-12);
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    property(&mut out, "Σ T̃_i + zero-arm plays = T_non and T̃_i ≤ m_i", 16, |r| {
        let strat = (
            0u64..10_000,
            prop::sample::select(PolicyKind::ALL.to_vec()),
            prop::sample::select(vec![Objective::O1, Objective::O2]),
        );
        r.run(&strat, |(seed, kind, objective)| {
            let b = o2_bundle();
            let mut cfg = RunConfig::new(kind, objective, 4_000, seed, 1);
            cfg.checkpoints = vec![150, 1_000, 4_000];
            let trace = harness::run(&b.scenario, &b.feasible, &b.genie, &cfg)
                .map_err(|e| TestCaseError::fail(e.to_string()))?
                .remove(0);
            let target = b.genie.profile(objective);
            let zero_plays = b.feasible.arms().iter().position(|a| a.is_zero()).map_or(0, |z| trace.arm_counts[z]);
            for cp in &trace.checkpoints {
                prop_assert_eq!(cp.t_tilde.iter().sum::<u64>() + cp.unattributed, cp.t_non);
                for (t, m) in cp.t_tilde.iter().zip(&cp.observations) {
                    prop_assert!(t <= m);
                }
            }
            let last = trace.checkpoints.last().unwrap();
            prop_assert_eq!(last.unattributed, if target.is_optimal(0) { 0 } else { zero_plays });
            let non: u64 = (0..b.feasible.len()).filter(|&k| !target.is_optimal(k)).map(|k| trace.arm_counts[k]).sum();
            prop_assert_eq!(non, last.t_non);
            let regret: f64 = (0..b.feasible.len()).map(|k| trace.arm_counts[k] as f64 * b.genie.o1.gap(k)).sum();
            prop_assert!((regret - last.regret).abs() <= 1e-9 * regret.max(1.0));
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    property(&mut out, "Jensen: E[f(a, X)] ≤ f(a, E[X]), equality only for point laws", 256, |r| {
        let strat = (proptest::collection::vec((0.0f64..=1.0, 0.01f64..1.0), 1..5), 1u32..100);
        r.run(&strat, |(raw, a)| {
            let total: f64 = raw.iter().map(|p| p.1).sum();
            let points: Vec<(f64, f64)> = raw.iter().map(|&(x, w)| (x, w / total)).collect();
            let law = ChannelDistribution::Discrete(DiscreteLaw::new(points).unwrap());
            let rate = RateFunction::ShannonLog;
            let lhs = law.expected_rate(&rate, 0, a);
            let rhs = rate.eval(0, a, law.mean());
            prop_assert!(lhs <= rhs + 1e-12);
            if !law.is_degenerate() {
                prop_assert!(lhs < rhs);
            } else {
                prop_assert!((lhs - rhs).abs() < 1e-12);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    property(&mut out, "streaming level means equal batch means", 64, |r| {
        let s = point_scenario(vec![vec![10, 20, 40]], 40, &[vec![(0.5, 1.0)]]);
        let f = FeasibleSet::enumerate(&s).unwrap();
        r.run(&proptest::collection::vec(0.0f64..=1.0, 1..400), |xs| {
            let mut p = Cwf1::new(&s, &f, PolicyOptions::default()).unwrap();
            for &x in &xs {
                p.update(1, &[Observation { channel: 0, gain: x }]).unwrap();
            }
            for (j, &a) in s.levels(0).iter().enumerate() {
                let batch = xs.iter().map(|x| (1.0 + f64::from(a) * x).ln()).sum::<f64>() / xs.len() as f64;
                prop_assert!((p.rate_means()[j] - batch).abs() <= 1e-12 * batch.max(1.0));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    property(&mut out, "log(1 + a x) is subadditive on every sampled grid", 64, |r| {
        let strat = (proptest::collection::btree_set(1u32..200, 1..4), 2usize..60);
        r.run(&strat, |(levels, steps)| {
            let levels: Vec<PowerMw> = levels.into_iter().collect();
            let report = validate_subadditivity(&RateFunction::ShannonLog, &[levels], 1.0 / steps as f64);
            prop_assert!(report.passed());
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    property(&mut out, "fixed seed gives byte-identical CSV output", 4, |r| {
        r.run(&(0u64..1_000), |seed| {
            let dir = tempfile::tempdir().unwrap();
            let mut snapshots = Vec::new();
            for _ in 0..2 {
                let args = [
                    "swf".to_string(),
                    "--config".to_string(),
                    config_path("rayleigh_o2.toml").display().to_string(),
                    "run".to_string(),
                    "--policy".to_string(),
                    "all".to_string(),
                    "--horizon".to_string(),
                    "3000".to_string(),
                    "--runs".to_string(),
                    "3".to_string(),
                    "--seed".to_string(),
                    seed.to_string(),
                    "--out-dir".to_string(),
                    dir.path().display().to_string(),
                ];
                let code = stochastic_waterfill::cli::main_with_args(args, &mut Vec::new(), &mut Vec::new());
                prop_assert_eq!(code, 0);
                let mut files: Vec<(std::ffi::OsString, Vec<u8>)> = std::fs::read_dir(dir.path())
                    .unwrap()
                    .map(|e| {
                        let e = e.unwrap();
                        (e.file_name(), std::fs::read(e.path()).unwrap())
                    })
                    .collect();
                files.sort();
                snapshots.push(files);
            }
            prop_assert_eq!(snapshots[0].len(), 11);
            for (a, b) in snapshots[0].iter().zip(&snapshots[1]) {
                prop_assert!(a == b, "{:?} differs", a.0);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    // T_non/n falls across checkpoints past 10³ rounds for the two
    // water-filling policies on their own scenarios.
    for (label, trace) in [("cwf1", cwf1_long()), ("cwf2", cwf2_long())] {
        let fracs: Vec<(u64, f64)> = trace
            .points
            .iter()
            .filter(|p| p.n > 1_000)
            .map(|p| (p.n, p.t_non_mean / p.n as f64))
            .collect();
        let rises = fracs.windows(2).filter(|w| w[1].1 > w[0].1).count();
        out.check(
            rises == 0,
            format!("{label}: mean T_non/n nonincreasing over {} checkpoints past 10³", fracs.len()),
        );
    }
    out
}

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "feasible-set count", criterion_1),
        (2, "oracle equivalence", criterion_2),
        (3, "non-optimal play bound respected", criterion_3),
        (4, "logarithmic regret shape", criterion_4),
        (5, "policy ordering", criterion_5),
        (6, "CWF2 convergence", criterion_6),
        (7, "reference optimal arms (soft)", criterion_7),
        (8, "invariant suites", criterion_8),
    ];
    let mut hard_failures = Vec::new();
    let mut lines = Vec::new();
    for (id, title, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::SoftPass => "PASS (soft)",
            Status::SoftFail => "FAIL (soft, not fatal)",
        };
        let line = format!("criterion {id} {tag}: {title} [{:.1?}]", start.elapsed());
        println!("{line}");
        for l in &outcome.lines {
            println!("    {l}");
        }
        lines.push(line);
        if outcome.status == Status::Fail {
            hard_failures.push(id);
        }
    }
    println!();
    println!("acceptance summary");
    for l in &lines {
        println!("  {l}");
    }
    if hard_failures.is_empty() {
        println!("all hard criteria passed");
    } else {
        println!("hard criteria failing: {hard_failures:?}");
        std::process::exit(1);
    }
}
