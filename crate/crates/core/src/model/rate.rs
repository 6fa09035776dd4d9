//! Per-channel power-to-rate maps `f_i(a, x)`.
//!
//! Two families are supported: the Shannon form `log(1 + a·x)` and a
//! user-supplied table of knots per (channel, power level), interpolated
//! piecewise-linearly and extrapolated past the last knot with the final
//! segment's slope so the map stays increasing on `[0, ∞)`.

use std::collections::BTreeMap;

use super::{ModelError, PowerMw};

/// Piecewise-linear curve through `(x, y)` knots, starting at `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Curve {
    /// Builds a curve, checking `f(0) = 0` and strict monotonicity.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, ModelError> {
        let bad = |reason: &str| ModelError::InvalidCurve(reason.to_string());
        if xs.len() != ys.len() {
            return Err(bad("x and y knot lists differ in length"));
        }
        if xs.len() < 2 {
            return Err(bad("at least two knots are required"));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(bad("knots must be finite"));
        }
        if xs[0] != 0.0 || ys[0] != 0.0 {
            return Err(bad("the first knot must be (0, 0)"));
        }
        for w in xs.windows(2) {
            if w[1] <= w[0] {
                return Err(bad("x knots must be strictly increasing"));
            }
        }
        for w in ys.windows(2) {
            if w[1] <= w[0] {
                return Err(bad("y knots must be strictly increasing"));
            }
        }
        Ok(Self { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let last = self.xs.len() - 1;
        // index of the segment containing x; past the end, reuse the final one
        let seg = match self.xs.iter().position(|&k| k >= x) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => last - 1,
        };
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let (y0, y1) = (self.ys[seg], self.ys[seg + 1]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// Tabulated rate family: one curve per (channel, power level).
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedRate {
    channels: Vec<BTreeMap<PowerMw, Curve>>,
}

impl TabulatedRate {
    pub fn new(channels: Vec<BTreeMap<PowerMw, Curve>>) -> Self {
        Self { channels }
    }

    pub fn curve(&self, channel: usize, power: PowerMw) -> Option<&Curve> {
        self.channels.get(channel).and_then(|m| m.get(&power))
    }

    pub fn channels(&self) -> &[BTreeMap<PowerMw, Curve>] {
        &self.channels
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RateFunction {
    /// `f(a, x) = ln(1 + a·x)` with `a` the power in mW taken as a real.
    ShannonLog,
    Tabulated(TabulatedRate),
}

impl RateFunction {
    #[inline]
    pub fn eval(&self, channel: usize, power: PowerMw, x: f64) -> f64 {
        if power == 0 {
            return 0.0;
        }
        match self {
            RateFunction::ShannonLog => (f64::from(power) * x).ln_1p(),
            RateFunction::Tabulated(t) => t
                .curve(channel, power)
                .map(|c| c.eval(x))
                .expect("tabulated rate checked against the scenario's power levels"),
        }
    }

    /// Closed-form solution of `f(a, x) = target` when the family has one.
    pub fn inverse(&self, channel: usize, power: PowerMw, target: f64) -> Option<f64> {
        let _ = channel;
        match self {
            RateFunction::ShannonLog if power > 0 => Some(target.exp_m1() / f64::from(power)),
            _ => None,
        }
    }

    /// Verifies that every `(channel, level)` of the scenario has a definition.
    pub(crate) fn check_levels(&self, levels: &[Vec<PowerMw>]) -> Result<(), ModelError> {
        let RateFunction::Tabulated(t) = self else {
            return Ok(());
        };
        for (channel, set) in levels.iter().enumerate() {
            for &power in set {
                if t.curve(channel, power).is_none() {
                    return Err(ModelError::MissingRateTable { channel, power });
                }
            }
        }
        Ok(())
    }
}

/// Outcome of a grid subadditivity check.
#[derive(Debug, Clone, PartialEq)]
pub enum SubadditivityReport {
    /// No violation found. `vacuous` is set when the grid had no pair with
    /// both points strictly inside `(0, 1]`, so nothing was actually tested.
    Pass { pairs_checked: usize, vacuous: bool },
    Violation {
        channel: usize,
        power: PowerMw,
        x: f64,
        y: f64,
        /// `f(a, x + y)`
        joint: f64,
        /// `f(a, x) + f(a, y)`
        split: f64,
    },
}

impl SubadditivityReport {
    pub fn passed(&self) -> bool {
        matches!(self, SubadditivityReport::Pass { .. })
    }
}

/// Checks `f(a, x + y) <= f(a, x) + f(a, y)` for all grid pairs with
/// `x + y <= 1`, every channel and every level in `levels`.
pub fn validate_subadditivity(
    rate: &RateFunction,
    levels: &[Vec<PowerMw>],
    grid_step: f64,
) -> SubadditivityReport {
    assert!(grid_step > 0.0, "grid_step must be positive");
    let steps = (1.0 / grid_step + 1e-9).floor() as usize;
    let mut pairs_checked = 0;
    for (channel, set) in levels.iter().enumerate() {
        for &power in set {
            for i in 1..=steps {
                for j in i..=steps - i {
                    let x = i as f64 * grid_step;
                    let y = j as f64 * grid_step;
                    let joint = rate.eval(channel, power, x + y);
                    let split = rate.eval(channel, power, x) + rate.eval(channel, power, y);
                    pairs_checked += 1;
                    if joint > split + 1e-12 * split.abs().max(1.0) {
                        return SubadditivityReport::Violation {
                            channel,
                            power,
                            x,
                            y,
                            joint,
                            split,
                        };
                    }
                }
            }
        }
    }
    SubadditivityReport::Pass {
        pairs_checked,
        vacuous: pairs_checked == 0,
    }
}
