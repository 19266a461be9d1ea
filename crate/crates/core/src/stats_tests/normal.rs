//! Standard normal density, distribution function and quantile.
//!
//! The distribution function goes through `erfc`, which keeps full relative
//! precision in both tails. The quantile inverts that same function by a
//! safeguarded Newton iteration, so the two never disagree by more than the
//! rounding of the forward evaluation.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// `phi(x) = e^{-x^2/2} / sqrt(2 pi)`.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Phi(x)`.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Phi(x)` without cancellation.
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `Phi^{-1}(p)` for `p` in `(0, 1)`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Solve in the lower tail, where Phi has full relative precision.
    // For p > 1/2, 1 - p is exact.
    let (target, sign) = if p < 0.5 { (p, 1.0) } else { (1.0 - p, -1.0) };
    Ok(sign * lower_tail_quantile(target))
}

/// Solves `Phi(x) = p` for `p < 1/2`, so `x < 0`.
fn lower_tail_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0_f64, 0.0_f64);
    // Start from the leading term of the tail expansion.
    let mut x = -(-2.0 * p.ln()).sqrt();
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let f = std_normal_cdf(x) - p;
        if f == 0.0 {
            return x;
        }
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        // Newton on log Phi converges in the far tail where Phi itself is tiny.
        let cdf = std_normal_cdf(x);
        let step = (cdf.ln() - p.ln()) * cdf / std_normal_pdf(x);
        let mut next = x - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
            return next;
        }
        x = next;
        if hi - lo <= f64::EPSILON * x.abs().max(1.0) {
            return x;
        }
    }
    x
}
