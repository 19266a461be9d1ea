use rand_distr::{Distribution, StandardNormal};

use super::{LevelFamily, SampleStream};
use crate::error::{Error, Result};
use crate::numeric::rates_equal;
use crate::rate_model::{RateTriplet, TailDescriptor, Upsilon};
use crate::stats_tests::{std_normal_pdf, std_normal_sf};

/// Independent Gaussian increments `Delta_l X ~ N(mu0 e^{-alpha l}, v0 e^{-beta l})`.
///
/// Every `Z_l` is chi-square with one degree of freedom, so the family is
/// uniformly integrable. The bias constant is the exact geometric tail
/// `c_alpha = mu0 e^{-alpha} / (1 - e^{-alpha})`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFamily {
    mu0: f64,
    v0: f64,
    rates: RateTriplet,
}

impl GaussianFamily {
    pub fn new(mu0: f64, v0: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, value) in [("mu0", mu0), ("v0", v0)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidFamily(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidRate {
                name: "alpha",
                value: alpha,
            });
        }
        let c_alpha = mu0 * (-alpha).exp() / -(-alpha).exp_m1();
        let rates = RateTriplet::new(alpha, beta, gamma, c_alpha)?;
        Ok(Self { mu0, v0, rates })
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }
}

impl LevelFamily for GaussianFamily {
    fn name(&self) -> &str {
        "gaussian"
    }

    fn rates(&self) -> RateTriplet {
        self.rates
    }

    fn delta_mean(&self, level: usize) -> f64 {
        self.mu0 * (-self.rates.alpha() * level as f64).exp()
    }

    fn delta_var(&self, level: usize) -> f64 {
        self.v0 * (-self.rates.beta() * level as f64).exp()
    }

    fn sample_delta(&self, level: usize, stream: &mut SampleStream) -> f64 {
        let z: f64 = StandardNormal.sample(stream);
        self.delta_mean(level) + self.delta_var(level).sqrt() * z
    }

    fn sample_level_sum(&self, level: usize, count: u64, stream: &mut SampleStream) -> f64 {
        let mean = self.delta_mean(level);
        let sd = self.delta_var(level).sqrt();
        let mut sum = crate::numeric::CompensatedSum::new();
        for _ in 0..count {
            let z: f64 = StandardNormal.sample(stream);
            sum.add(mean + sd * z);
        }
        sum.value()
    }

    fn lindeberg_tail(&self, _level: usize, threshold: f64) -> Option<f64> {
        Some(gaussian_lindeberg_tail(threshold))
    }

    fn tail_descriptor(&self) -> TailDescriptor {
        let (alpha, beta, gamma) = (self.rates.alpha(), self.rates.beta(), self.rates.gamma());
        let balanced = rates_equal(beta, gamma);
        let gamma_dominant = gamma > beta && !balanced;
        // Uniform integrability makes the level tail limit hold whenever
        // its threshold S_l^2 e^{(2 alpha - gamma) l} diverges.
        let threshold_diverges = if balanced {
            true
        } else if gamma_dominant {
            beta < 2.0 * alpha && !rates_equal(beta, 2.0 * alpha)
        } else {
            gamma < 2.0 * alpha && !rates_equal(gamma, 2.0 * alpha)
        };
        TailDescriptor {
            partial_sums_diverge: Some(balanced || gamma_dominant),
            upsilon: if gamma_dominant && beta < 2.0 * alpha {
                Upsilon::Exists(0.5 * (beta + 2.0 * alpha))
            } else {
                Upsilon::Unknown
            },
            lim_cond: Some(threshold_diverges),
        }
    }
}

/// `E[Z 1{Z > t}]` for `Z ~ chi-square(1)`:
/// `2 sqrt(t) phi(sqrt(t)) + 2 (1 - Phi(sqrt(t)))`.
pub fn gaussian_lindeberg_tail(threshold: f64) -> f64 {
    if threshold <= 0.0 {
        return 1.0;
    }
    let s = threshold.sqrt();
    2.0 * s * std_normal_pdf(s) + 2.0 * std_normal_sf(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_examples() {
        assert_eq!(gaussian_lindeberg_tail(0.0), 1.0);
        // mpmath: 2 sqrt(t) npdf(sqrt(t)) + 2 (1 - ncdf(sqrt(t))), 40 digits
        assert!((gaussian_lindeberg_tail(3.8416) - 0.279_084_292_083_570_6).abs() < 1e-14);
        assert!((gaussian_lindeberg_tail(4.0) - 0.261_464_129_949_110_6).abs() < 1e-14);
        let far = gaussian_lindeberg_tail(100.0);
        assert!(far < 1e-20);
        assert!((far / 1.554_159_431_389_605e-21 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_is_nonincreasing() {
        let mut prev = 1.0;
        for i in 0..2000 {
            let t = i as f64 * 0.05;
            let v = gaussian_lindeberg_tail(t);
            assert!(v <= prev + 1e-16 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GaussianFamily::new(0.0, 1.0, 1.0, 1.0, 0.5).is_err());
        assert!(GaussianFamily::new(1.0, -1.0, 1.0, 1.0, 0.5).is_err());
        assert!(GaussianFamily::new(1.0, 1.0, 0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn bias_constant_bounds_exact_bias() {
        let f = GaussianFamily::new(1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        let c = f.rates().c_alpha();
        for l in 0..20 {
            let bias: f64 = (l + 1..200).map(|k| f.delta_mean(k)).sum();
            let bound = c * (-(l as f64)).exp();
            assert!((bias - bound).abs() <= 1e-14 * bound);
        }
    }
}
