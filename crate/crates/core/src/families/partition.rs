use super::{bernoulli, two_point_tail, LevelFamily, SampleStream};
use crate::error::{Error, Result};
use crate::rate_model::{RateTriplet, TailDescriptor, Upsilon};

/// Increments supported on disjoint events: `Delta_l X = a_l 1{Omega_l}`
/// with `P(Omega_l) = q_l = (1 - p) p^l` and `a_l = e^{eta l}`.
///
/// Bias decays at `alpha = -ln p - eta` and the variance at
/// `beta = -ln p - 2 eta`. The normalized squares `Z_l` are not uniformly
/// integrable: `E[Z_l 1{Z_l > x}] -> 1` for every `x > 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionFamily {
    p: f64,
    eta: f64,
    rates: RateTriplet,
}

impl PartitionFamily {
    /// `p = e^{-1}`, `eta = 1/4`, giving `alpha = 3/4` and `beta = 1/2`.
    pub fn standard(gamma: f64) -> Result<Self> {
        Self::new((-1.0f64).exp(), 0.25, gamma)
    }

    pub fn new(p: f64, eta: f64, gamma: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidFamily(format!(
                "p must lie in (0, 1), got {p}"
            )));
        }
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidFamily(format!(
                "eta must be positive, got {eta}"
            )));
        }
        let decay = -p.ln();
        if eta >= decay {
            return Err(Error::InvalidFamily(format!(
                "eta = {eta} must be below -ln p = {decay} for the bias series to converge"
            )));
        }
        let alpha = decay - eta;
        let beta = decay - 2.0 * eta;
        if beta <= 0.0 {
            return Err(Error::InvalidFamily(format!(
                "eta = {eta} must be below -ln(p)/2 = {} for the variance to decay",
                decay / 2.0
            )));
        }
        let c_alpha = (1.0 - p) * (-alpha).exp() / -(-alpha).exp_m1();
        let rates = RateTriplet::new(alpha, beta, gamma, c_alpha)?;
        Ok(Self { p, eta, rates })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `q_l = P(Omega_l)`.
    pub fn event_probability(&self, level: usize) -> f64 {
        (1.0 - self.p) * self.p.powi(level as i32)
    }

    /// `a_l = e^{eta l}`.
    pub fn jump(&self, level: usize) -> f64 {
        (self.eta * level as f64).exp()
    }

    /// Exact `(E[Delta_l X], Var(Delta_l X))`.
    pub fn moments(&self, level: usize) -> (f64, f64) {
        let q = self.event_probability(level);
        let a = self.jump(level);
        (a * q, a * a * q * (1.0 - q))
    }

    /// `E[X - X_l] = sum_{k > l} a_k q_k`, a geometric tail with ratio `e^{-alpha}`.
    pub fn bias(&self, level: usize) -> f64 {
        let alpha = self.rates.alpha();
        (1.0 - self.p) * (-alpha * (level as f64 + 1.0)).exp() / -(-alpha).exp_m1()
    }
}

impl LevelFamily for PartitionFamily {
    fn name(&self) -> &str {
        "partition"
    }

    fn rates(&self) -> RateTriplet {
        self.rates
    }

    fn delta_mean(&self, level: usize) -> f64 {
        self.moments(level).0
    }

    fn delta_var(&self, level: usize) -> f64 {
        self.moments(level).1
    }

    fn sample_delta(&self, level: usize, stream: &mut SampleStream) -> f64 {
        if bernoulli(stream, self.event_probability(level)) {
            self.jump(level)
        } else {
            0.0
        }
    }

    fn lindeberg_tail(&self, level: usize, threshold: f64) -> Option<f64> {
        if self.delta_var(level) == 0.0 {
            return Some(0.0);
        }
        Some(two_point_tail(self.event_probability(level), threshold))
    }

    /// `S_k` is bounded for `gamma < beta`, grows linearly for `gamma = beta`
    /// and like `e^{(gamma - beta) k / 2}` beyond. The level tail limit compares
    /// the threshold `S_l^2 e^{(2 alpha - gamma) l}` against the jump ratio
    /// `(1 - q_l)/q_l ~ e^{-l ln p}`: the threshold wins exactly when
    /// `gamma <= beta`.
    fn tail_descriptor(&self) -> TailDescriptor {
        let (alpha, beta, gamma) = (self.rates.alpha(), self.rates.beta(), self.rates.gamma());
        let balanced = crate::numeric::rates_equal(beta, gamma);
        let gamma_dominant = gamma > beta && !balanced;
        TailDescriptor {
            partial_sums_diverge: Some(balanced || gamma_dominant),
            upsilon: if gamma_dominant {
                Upsilon::Exists(0.5 * (beta + 2.0 * alpha))
            } else {
                Upsilon::Unknown
            },
            lim_cond: Some(!gamma_dominant),
        }
    }
}
