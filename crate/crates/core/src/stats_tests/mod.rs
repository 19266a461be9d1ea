//! Goodness of fit of normalized estimator samples against `N(0, 1)`.

mod normal;

pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf};

use serde::Serialize;

use crate::engine::MomentAccumulator;
use crate::error::{Error, Result};

/// Asymptotic 5% critical value of `sqrt(n) D_n`.
pub const KS_CRITICAL_5PCT: f64 = 1.3581;

fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample(i));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(sorted)
}

/// One-sample Kolmogorov-Smirnov distance to the standard normal,
/// `D_n = max_i max(i/n - Phi(x_(i)), Phi(x_(i)) - (i-1)/n)`.
pub fn ks_statistic(samples: &[f64]) -> Result<f64> {
    let sorted = sorted_finite(samples)?;
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = std_normal_cdf(x);
            let upper = (i as f64 + 1.0) / n - cdf;
            let lower = cdf - i as f64 / n;
            upper.max(lower)
        })
        .fold(0.0, f64::max);
    Ok(d.clamp(0.0, 1.0))
}

/// Sample moments. Fields that need more data than available are `None`:
/// variance and skewness need two samples, excess kurtosis four, and both
/// shape statistics a non-zero spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleMoments {
    pub n: usize,
    pub mean: f64,
    /// Unbiased, divides by `n - 1`.
    pub variance: Option<f64>,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

impl From<&MomentAccumulator> for SampleMoments {
    fn from(acc: &MomentAccumulator) -> Self {
        Self {
            n: acc.count() as usize,
            mean: acc.mean(),
            variance: acc.variance(),
            skewness: acc.skewness(),
            excess_kurtosis: acc.excess_kurtosis(),
        }
    }
}

/// Two-pass moments: mean, unbiased variance, `g1 = m3 / m2^{3/2}` and
/// `g2 = m4 / m2^2 - 3` with `m_k` the biased central moments.
pub fn sample_moments(samples: &[f64]) -> Result<SampleMoments> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample(i));
    }
    let n = samples.len();
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let central = |k: i32| samples.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / nf;
    let m2 = central(2);
    let spread = n >= 2 && m2 > 0.0;
    Ok(SampleMoments {
        n,
        mean,
        variance: (n >= 2).then(|| m2 * nf / (nf - 1.0)),
        skewness: spread.then(|| central(3) / m2.powf(1.5)),
        excess_kurtosis: (spread && n >= 4).then(|| central(4) / (m2 * m2) - 3.0),
    })
}

/// Pairs `(Phi^{-1}((i - 0.5)/n), x_(i))` for `i = 1..=n`.
pub fn qq_points(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    let sorted = sorted_finite(samples)?;
    let n = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, x)| Ok((std_normal_quantile((i as f64 + 0.5) / n)?, x)))
        .collect()
}

/// Writes QQ pairs as CSV with header `theoretical,empirical`.
pub fn write_qq_csv<W: std::io::Write>(points: &[(f64, f64)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "theoretical,empirical")?;
    for (t, e) in points {
        writeln!(out, "{t:.16e},{e:.16e}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityReport {
    pub n: usize,
    pub ks_stat: f64,
    pub ks_critical_5pct: f64,
    pub pass_5pct: bool,
    pub mean: f64,
    pub variance: Option<f64>,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

impl NormalityReport {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let ks_stat = ks_statistic(samples)?;
        let moments = sample_moments(samples)?;
        let critical = KS_CRITICAL_5PCT / (samples.len() as f64).sqrt();
        Ok(Self {
            n: samples.len(),
            ks_stat,
            ks_critical_5pct: critical,
            pass_5pct: ks_stat < critical,
            mean: moments.mean,
            variance: moments.variance,
            skewness: moments.skewness,
            excess_kurtosis: moments.excess_kurtosis,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plug_in(n: usize) -> Vec<f64> {
        (1..=n)
            .map(|i| std_normal_quantile((i as f64 - 0.5) / n as f64).unwrap())
            .collect()
    }

    #[test]
    fn ks_examples() {
        assert!((ks_statistic(&plug_in(10)).unwrap() - 0.05).abs() < 1e-12);
        assert_eq!(ks_statistic(&[0.0]).unwrap(), 0.5);
        assert!(ks_statistic(&[10.0, 11.0, 12.0]).unwrap() >= 0.999);
        assert!(matches!(ks_statistic(&[]), Err(Error::EmptySample)));
        assert!(matches!(
            ks_statistic(&[0.0, f64::NAN]),
            Err(Error::NonFiniteSample(1))
        ));
    }

    #[test]
    fn moments_examples() {
        let m = sample_moments(&[-1.0, 1.0]).unwrap();
        assert_eq!(m.mean, 0.0);
        assert_eq!(m.variance, Some(2.0));
        assert_eq!(m.skewness, Some(0.0));
        assert_eq!(m.excess_kurtosis, None);

        let m = sample_moments(&[-3.5, 0.0, 3.5]).unwrap();
        assert_eq!(m.skewness, Some(0.0));

        let m = sample_moments(&[2.0]).unwrap();
        assert_eq!(m.variance, None);
        assert_eq!(m.skewness, None);
        let m = sample_moments(&[2.0; 6]).unwrap();
        assert_eq!(m.variance, Some(0.0));
        assert_eq!(m.skewness, None);
    }

    #[test]
    fn qq_examples() {
        let pts = qq_points(&[1.0, -1.0]).unwrap();
        let q = std_normal_quantile(0.75).unwrap();
        assert!((pts[0].0 + q).abs() < 1e-15 && (pts[1].0 - q).abs() < 1e-15);
        assert_eq!((pts[0].1, pts[1].1), (-1.0, 1.0));

        for (t, e) in qq_points(&plug_in(50)).unwrap() {
            assert!((t - e).abs() < 1e-10);
        }
    }

    #[test]
    fn qq_csv_layout() {
        let mut buf = Vec::new();
        write_qq_csv(&[(0.5, -0.25)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "theoretical,empirical\n5.0000000000000000e-1,-2.5000000000000000e-1\n"
        );
    }

    #[test]
    fn report_pass_flag_matches_critical_value() {
        let r = NormalityReport::from_samples(&plug_in(500)).unwrap();
        assert!(r.pass_5pct);
        assert!((r.ks_critical_5pct - 1.3581 / 500f64.sqrt()).abs() < 1e-15);
        let r = NormalityReport::from_samples(&[5.0; 500]).unwrap();
        assert!(!r.pass_5pct);
    }
}
