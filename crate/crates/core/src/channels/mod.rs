//! Gain-to-noise-ratio laws on `[0, 1]`, sampling, and exact moments.
//!
//! The truncated-Rayleigh law models block fading: an amplitude
//! `h ~ Rayleigh(σ)` gives a gain-to-noise ratio `g = h² / (N₀·B)` with `N₀`
//! in W/Hz and `B` in Hz, normalized as `X = min(1, g / G_max)`. Since `h²`
//! is exponential with mean `2σ²`, `X` is an exponential of mean
//! `μ = 2σ² / (N₀·B·G_max)` clipped at 1, leaving an atom of mass
//! `exp(-1/μ)` at `x = 1`. Every exact expectation includes that atom.

pub mod quadrature;
mod rng;

use thiserror::Error;

use crate::model::{PowerMw, RateFunction};

pub use rng::{GainRng, GENERATOR_NAME};

const QUAD_TOL: f64 = 1e-13;
const PROB_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("discrete law needs at least one support point")]
    EmptySupport,
    #[error("support point {0} lies outside [0, 1]")]
    SupportOutOfRange(f64),
    #[error("probability {0} is negative or not finite")]
    BadProbability(f64),
    #[error("probabilities sum to {0}, not 1")]
    ProbabilitySum(f64),
    #[error("Rayleigh scale must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("bandwidth must be positive, got {0} Hz")]
    NonPositiveBandwidth(f64),
    #[error("noise density must be finite, got {0} dBW/Hz")]
    BadNoiseDensity(f64),
    #[error("gain normalizer must be positive, got {0}")]
    NonPositiveGMax(f64),
}

/// Finite-support law given as `(value, probability)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLaw {
    points: Vec<(f64, f64)>,
}

impl DiscreteLaw {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, ChannelError> {
        if points.is_empty() {
            return Err(ChannelError::EmptySupport);
        }
        let mut total = 0.0;
        for &(x, p) in &points {
            if !(0.0..=1.0).contains(&x) {
                return Err(ChannelError::SupportOutOfRange(x));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(ChannelError::BadProbability(p));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(ChannelError::ProbabilitySum(total));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    fn sample(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &(x, p) in &self.points {
            acc += p;
            if u < acc {
                return x;
            }
        }
        // rounding left u above the last cumulative sum
        self.points.last().map(|&(x, _)| x).unwrap_or(0.0)
    }
}

/// Physical Rayleigh parameters before normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighParams {
    pub sigma: f64,
    pub noise_density_dbw_per_hz: f64,
    pub bandwidth_hz: f64,
}

impl RayleighParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(ChannelError::NonPositiveSigma(self.sigma));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(ChannelError::NonPositiveBandwidth(self.bandwidth_hz));
        }
        if !self.noise_density_dbw_per_hz.is_finite() {
            return Err(ChannelError::BadNoiseDensity(self.noise_density_dbw_per_hz));
        }
        Ok(())
    }

    /// Noise power `N₀·B` in watts.
    pub fn noise_power_w(&self) -> f64 {
        10f64.powf(self.noise_density_dbw_per_hz / 10.0) * self.bandwidth_hz
    }

    /// Quantile of the (unclipped) gain-to-noise ratio `g`.
    pub fn gain_quantile(&self, q: f64) -> f64 {
        2.0 * self.sigma * self.sigma * -(-q).ln_1p() / self.noise_power_w()
    }
}

/// Default gain normalizer: the 99.9th percentile of `g` for the strongest
/// channel (largest σ when the noise parameters are shared).
pub fn p999_g_max<'a>(params: impl IntoIterator<Item = &'a RayleighParams>) -> Option<f64> {
    params
        .into_iter()
        .map(|p| p.gain_quantile(0.999))
        .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |a| a.max(g))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedRayleigh {
    params: RayleighParams,
    g_max: f64,
    mu: f64,
}

impl TruncatedRayleigh {
    pub fn new(params: RayleighParams, g_max: f64) -> Result<Self, ChannelError> {
        params.validate()?;
        if !(g_max > 0.0 && g_max.is_finite()) {
            return Err(ChannelError::NonPositiveGMax(g_max));
        }
        let mu = 2.0 * params.sigma * params.sigma / (params.noise_power_w() * g_max);
        Ok(Self { params, g_max, mu })
    }

    pub fn params(&self) -> &RayleighParams {
        &self.params
    }

    pub fn g_max(&self) -> f64 {
        self.g_max
    }

    /// Mean of the unclipped normalized gain `g / G_max`.
    pub fn scale(&self) -> f64 {
        self.mu
    }

    /// `P(X = 1)`.
    pub fn truncation_mass(&self) -> f64 {
        (-1.0 / self.mu).exp()
    }

    fn density(&self, x: f64) -> f64 {
        (-x / self.mu).exp() / self.mu
    }

    fn sample(&self, u: f64) -> f64 {
        (-(-u).ln_1p() * self.mu).min(1.0)
    }

    // Breakpoints that keep the adaptive rule from wasting effort on the
    // flat tail when μ is small.
    fn breaks(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        for k in [1.0, 4.0, 16.0, 64.0] {
            let x = k * self.mu;
            if x < 1.0 {
                b.push(x);
            }
        }
        b.push(1.0);
        b
    }

    /// `E[g(X)]` with the atom at 1 included.
    fn expect<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let continuous = quadrature::integrate_pieces(|x| g(x) * self.density(x), &self.breaks(), QUAD_TOL);
        continuous + self.truncation_mass() * g(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelDistribution {
    Discrete(DiscreteLaw),
    TruncatedRayleigh(TruncatedRayleigh),
}

impl ChannelDistribution {
    /// Maps one uniform draw to a gain (inverse-CDF sampling).
    #[inline]
    pub fn sample_from_uniform(&self, u: f64) -> f64 {
        match self {
            ChannelDistribution::Discrete(d) => d.sample(u),
            ChannelDistribution::TruncatedRayleigh(r) => r.sample(u),
        }
    }

    /// `θ = E[X]`.
    pub fn mean(&self) -> f64 {
        match self {
            ChannelDistribution::Discrete(d) => d.points.iter().map(|&(x, p)| x * p).sum(),
            ChannelDistribution::TruncatedRayleigh(r) => r.expect(|x| x),
        }
    }

    /// `E[f(a, X)]`, the mean of the lifted variable `Y_{i,a}`.
    pub fn expected_rate(&self, rate: &RateFunction, channel: usize, power: PowerMw) -> f64 {
        match self {
            ChannelDistribution::Discrete(d) => d
                .points
                .iter()
                .map(|&(x, p)| p * rate.eval(channel, power, x))
                .sum(),
            ChannelDistribution::TruncatedRayleigh(r) => r.expect(|x| rate.eval(channel, power, x)),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match self {
            ChannelDistribution::Discrete(d) => {
                let first = d.points[0].0;
                d.points.iter().all(|&(x, p)| p == 0.0 || x == first)
            }
            ChannelDistribution::TruncatedRayleigh(_) => false,
        }
    }
}

/// Gains of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSample {
    pub values: Vec<f64>,
    pub round: u64,
}

/// Draws one gain per channel, one uniform each, in channel order.
pub fn sample(laws: &[ChannelDistribution], rng: &mut GainRng, round: u64) -> GainSample {
    let mut values = vec![0.0; laws.len()];
    sample_into(laws, rng, &mut values);
    GainSample { values, round }
}

/// Allocation-free variant of [`sample`].
#[inline]
pub fn sample_into(laws: &[ChannelDistribution], rng: &mut GainRng, out: &mut [f64]) {
    for (law, slot) in laws.iter().zip(out.iter_mut()) {
        *slot = law.sample_from_uniform(rng.uniform());
    }
}
