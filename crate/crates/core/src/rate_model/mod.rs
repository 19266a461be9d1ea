//! Rate constants and the deterministic arithmetic of an MLMC plan.
//!
//! All rates are in nats per level: bias decays like `e^{-alpha l}`, the
//! level variance like `e^{-beta l}` and the cost of one level sample grows
//! like `e^{gamma l}`. This is the natural-log convention, not the `2^{-alpha l}`
//! convention common in the MLMC literature; convert with a factor `ln 2`.

mod plan;
mod regime;

pub use plan::{
    level_sums, make_plan, num_levels, sample_allocation, variance_ratio, EstimatorPlan,
    LevelSchedule,
};
pub use regime::{classify_regime, Condition, Regime, RegimeKind, TailDescriptor, Upsilon};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The rate constants `(alpha, beta, gamma, c_alpha)` of an MLMC hierarchy.
///
/// Constructed values are always admissible: every constant is positive and
/// `min(beta, gamma) <= 2 * alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRates", into = "RawRates")]
pub struct RateTriplet {
    alpha: f64,
    beta: f64,
    gamma: f64,
    c_alpha: f64,
}

impl RateTriplet {
    pub fn new(alpha: f64, beta: f64, gamma: f64, c_alpha: f64) -> Result<Self> {
        for (name, value) in [
            ("alpha", alpha),
            ("beta", beta),
            ("gamma", gamma),
            ("c_alpha", c_alpha),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidRate { name, value });
            }
        }
        let min = beta.min(gamma);
        if min > 2.0 * alpha && !crate::numeric::rates_equal(min, 2.0 * alpha) {
            return Err(Error::InadmissibleRates {
                min,
                two_alpha: 2.0 * alpha,
            });
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            c_alpha,
        })
    }

    /// Weak-error (bias) rate.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Variance decay rate.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Cost growth rate.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Bias constant: `|E[X - X_l]| <= c_alpha e^{-alpha l}`.
    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    /// Same rates with a different bias constant.
    pub fn with_c_alpha(self, c_alpha: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.gamma, c_alpha)
    }

    pub fn regime(&self, tail: &TailDescriptor) -> Regime {
        classify_regime(self.alpha, self.beta, self.gamma, tail)
    }
}

/// Unvalidated wire form of [`RateTriplet`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRates {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub c_alpha: f64,
}

impl TryFrom<RawRates> for RateTriplet {
    type Error = Error;

    fn try_from(raw: RawRates) -> Result<Self> {
        Self::new(raw.alpha, raw.beta, raw.gamma, raw.c_alpha)
    }
}

impl From<RateTriplet> for RawRates {
    fn from(r: RateTriplet) -> Self {
        Self {
            alpha: r.alpha,
            beta: r.beta,
            gamma: r.gamma,
            c_alpha: r.c_alpha,
        }
    }
}
