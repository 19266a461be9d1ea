use rand_distr::{Binomial, Distribution};

use super::{bernoulli, two_point_tail, LevelFamily, SampleStream};
use crate::error::{Error, Result};
use crate::rate_model::{RateTriplet, TailDescriptor, Upsilon};

/// Centered rare-jump increments whose variance decays at the fastest
/// admissible rate, `V_l = e^{-2 alpha l}`, while the cost grows at
/// `gamma > 2 alpha`.
///
/// `Delta_l X = a_l (1{B_l} - q_l)` with `P(B_l) = q_l = q0 e^{-lambda l}` and
/// `a_l^2 q_l (1 - q_l) = e^{-2 alpha l}`. Under the standard allocation the
/// finest level then receives a bounded number of samples while carrying a
/// fixed share of the estimator variance, and the normalized estimator does
/// not approach a normal law.
///
/// The declared `beta` is only an upper-envelope rate and must lie below
/// `2 alpha`; the true decay is `2 alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeavyFailureFamily {
    q0: f64,
    jump_rate: f64,
    rates: RateTriplet,
}

impl HeavyFailureFamily {
    pub const DEFAULT_ALPHA: f64 = 1.0;
    pub const DEFAULT_GAMMA: f64 = 2.5;
    pub const DEFAULT_BETA: f64 = 1.5;
    pub const DEFAULT_Q0: f64 = 0.25;
    pub const DEFAULT_JUMP_RATE: f64 = 1.0;

    pub fn new(alpha: f64, gamma: f64, beta: f64, q0: f64, jump_rate: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidRate {
                name: "alpha",
                value: alpha,
            });
        }
        if gamma <= 2.0 * alpha || !gamma.is_finite() {
            return Err(Error::InvalidFamily(format!(
                "gamma = {gamma} must exceed 2 alpha = {}",
                2.0 * alpha
            )));
        }
        if !(beta > 0.0 && beta < 2.0 * alpha) {
            return Err(Error::InvalidFamily(format!(
                "declared beta = {beta} must lie in (0, 2 alpha)"
            )));
        }
        if !(q0 > 0.0 && q0 < 0.5) {
            return Err(Error::InvalidFamily(format!(
                "q0 = {q0} must lie in (0, 1/2)"
            )));
        }
        if !(jump_rate.is_finite() && jump_rate > 0.0) {
            return Err(Error::InvalidFamily(format!(
                "jump rate must be positive, got {jump_rate}"
            )));
        }
        // zero bias, so any c_alpha bounds it
        let rates = RateTriplet::new(alpha, beta, gamma, 1.0)?;
        Ok(Self {
            q0,
            jump_rate,
            rates,
        })
    }

    pub fn with_defaults() -> Self {
        Self::new(
            Self::DEFAULT_ALPHA,
            Self::DEFAULT_GAMMA,
            Self::DEFAULT_BETA,
            Self::DEFAULT_Q0,
            Self::DEFAULT_JUMP_RATE,
        )
        .expect("default constants are valid")
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn jump_rate(&self) -> f64 {
        self.jump_rate
    }

    /// `q_l = q0 e^{-lambda l}`.
    pub fn jump_probability(&self, level: usize) -> f64 {
        self.q0 * (-self.jump_rate * level as f64).exp()
    }

    /// `a_l = e^{-alpha l} / sqrt(q_l (1 - q_l))`.
    pub fn jump_size(&self, level: usize) -> f64 {
        let q = self.jump_probability(level);
        (-self.rates.alpha() * level as f64).exp() / (q * (1.0 - q)).sqrt()
    }
}

impl LevelFamily for HeavyFailureFamily {
    fn name(&self) -> &str {
        "heavy_failure"
    }

    fn rates(&self) -> RateTriplet {
        self.rates
    }

    fn delta_mean(&self, _level: usize) -> f64 {
        0.0
    }

    fn delta_var(&self, level: usize) -> f64 {
        (-2.0 * self.rates.alpha() * level as f64).exp()
    }

    fn sample_delta(&self, level: usize, stream: &mut SampleStream) -> f64 {
        let q = self.jump_probability(level);
        let a = self.jump_size(level);
        if bernoulli(stream, q) {
            a * (1.0 - q)
        } else {
            -a * q
        }
    }

    /// The jump count of `count` draws is `Binomial(count, q_l)`, so the level
    /// sum is drawn exactly as `a_l (K - count q_l)`.
    fn sample_level_sum(&self, level: usize, count: u64, stream: &mut SampleStream) -> f64 {
        let q = self.jump_probability(level);
        let a = self.jump_size(level);
        let jumps = Binomial::new(count, q)
            .expect("q lies in (0, 1/2)")
            .sample(stream);
        a * (jumps as f64 - count as f64 * q)
    }

    fn fine_mean(&self, _finest: usize) -> f64 {
        0.0
    }

    fn lindeberg_tail(&self, level: usize, threshold: f64) -> Option<f64> {
        Some(two_point_tail(self.jump_probability(level), threshold))
    }

    /// `S_k ~ e^{(gamma - 2 alpha) k / 2}` grows, but too slowly for any
    /// `upsilon < 2 alpha`; the level tail terms tend to one.
    fn tail_descriptor(&self) -> TailDescriptor {
        TailDescriptor {
            partial_sums_diverge: Some(true),
            upsilon: Upsilon::DoesNotExist,
            lim_cond: Some(false),
        }
    }
}
