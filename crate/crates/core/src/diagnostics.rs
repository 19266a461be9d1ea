//! Analytic checks of the central limit conditions on a concrete family.
//!
//! Everything here is deterministic. Tail expectations come from the family's
//! exact oracle; a family without one falls back to a seeded Monte Carlo
//! estimate whose standard error is reported alongside.

use serde::Serialize;

use crate::engine::{check_plan, level_stream};
use crate::error::{Error, Result};
use crate::families::{HeavyFailureFamily, LevelFamily};
use crate::numeric::CompensatedSum;
use crate::rate_model::{level_sums, variance_ratio, EstimatorPlan, Regime};

/// Draws used by [`estimate_lindeberg_tail`] when a family has no oracle.
pub const TAIL_ESTIMATE_DRAWS: u64 = 1_000_000;
const TAIL_ESTIMATE_SEED: u64 = 0x5eed_7a11;

/// A tail expectation, exact or estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailValue {
    pub value: f64,
    /// Standard error of a Monte Carlo estimate; `None` when exact.
    pub standard_error: Option<f64>,
}

/// Monte Carlo estimate of `E[Z_l 1{Z_l > t}]` from `draws` samples of the
/// family's increments.
pub fn estimate_lindeberg_tail<F: LevelFamily + ?Sized>(
    family: &F,
    level: usize,
    threshold: f64,
    draws: u64,
) -> TailValue {
    let variance = family.delta_var(level);
    if variance == 0.0 || draws == 0 {
        return TailValue {
            value: 0.0,
            standard_error: Some(0.0),
        };
    }
    let mean = family.delta_mean(level);
    let mut stream = level_stream(TAIL_ESTIMATE_SEED, 0, level);
    let (mut sum, mut sum_sq) = (CompensatedSum::new(), CompensatedSum::new());
    for _ in 0..draws {
        let d = family.sample_delta(level, &mut stream) - mean;
        let z = d * d / variance;
        let y = if z > threshold { z } else { 0.0 };
        sum.add(y);
        sum_sq.add(y * y);
    }
    let n = draws as f64;
    let value = sum.value() / n;
    let var = (sum_sq.value() / n - value * value).max(0.0);
    TailValue {
        value,
        standard_error: Some((var / n).sqrt()),
    }
}

/// The family's exact tail, or the Monte Carlo fallback.
pub fn lindeberg_tail<F: LevelFamily + ?Sized>(
    family: &F,
    level: usize,
    threshold: f64,
) -> TailValue {
    match family.lindeberg_tail(level, threshold) {
        Some(value) => TailValue {
            value,
            standard_error: None,
        },
        None => estimate_lindeberg_tail(family, level, threshold, TAIL_ESTIMATE_DRAWS),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LindebergTerm {
    pub level: usize,
    /// `sqrt(V_l C_l) / S_L`.
    pub weight: f64,
    /// `eps^2 M_l^2 nu / V_l`; `None` when `V_l = 0`.
    pub threshold: Option<f64>,
    pub tail: TailValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LindebergReport {
    pub epsilon: f64,
    pub nu: f64,
    pub finest_level: usize,
    pub per_level_terms: Vec<LindebergTerm>,
    /// `sum_l weight_l * tail_l`.
    pub total: f64,
    /// All tails came from an exact oracle.
    pub exact: bool,
}

fn check_nu(nu: f64) -> Result<()> {
    if nu.is_finite() && nu > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidNu(nu))
    }
}

/// `sum_{l <= L, V_l > 0} (sqrt(V_l C_l) / S_L) E[Z_l 1{Z_l > eps^2 M_l^2 nu / V_l}]`.
///
/// The estimator satisfies the CLT exactly when this vanishes as
/// `eps -> 0` for every `nu > 0`. Dividing by
/// [`variance_ratio`] recovers the normalization by `Var A_ML`
/// instead of `eps^2`.
pub fn lindeberg_sum<F: LevelFamily + ?Sized>(
    family: &F,
    plan: &EstimatorPlan,
    nu: f64,
) -> Result<LindebergReport> {
    check_nu(nu)?;
    check_plan(family, plan)?;
    let schedule = plan.schedule();
    let s_total = *plan.partial_sums().last().expect("plans have a level");
    let eps2 = plan.epsilon() * plan.epsilon();
    let mut total = CompensatedSum::new();
    let mut exact = true;
    let per_level_terms = schedule
        .variances()
        .iter()
        .zip(schedule.costs())
        .zip(plan.samples())
        .enumerate()
        .map(|(level, ((&v, &c), &m))| {
            if v == 0.0 {
                return LindebergTerm {
                    level,
                    weight: 0.0,
                    threshold: None,
                    tail: TailValue {
                        value: 0.0,
                        standard_error: None,
                    },
                };
            }
            let weight = (v * c).sqrt() / s_total;
            let m = m as f64;
            let threshold = eps2 * m * m * nu / v;
            let tail = lindeberg_tail(family, level, threshold);
            exact &= tail.standard_error.is_none();
            total.add(weight * tail.value);
            LindebergTerm {
                level,
                weight,
                threshold: Some(threshold),
                tail,
            }
        })
        .collect();
    Ok(LindebergReport {
        epsilon: plan.epsilon(),
        nu,
        finest_level: plan.finest_level(),
        per_level_terms,
        total: total.value().max(0.0),
        exact,
    })
}

/// `1{V_l > 0} E[Z_l 1{Z_l > nu S_l^2 e^{(2 alpha - gamma) l}}]`, with `S_l`
/// taken from the family's own schedule.
pub fn lim_cond_term<F: LevelFamily + ?Sized>(family: &F, level: usize, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if family.delta_var(level) == 0.0 {
        return Ok(0.0);
    }
    let schedule = family.schedule(level)?;
    let s = *level_sums(&schedule).last().expect("schedule has a level");
    let rates = family.rates();
    let growth = ((2.0 * rates.alpha() - rates.gamma()) * level as f64).exp();
    let threshold = nu * s * s * growth;
    Ok(lindeberg_tail(family, level, threshold).value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimCondPoint {
    pub level: usize,
    pub nu: f64,
    pub value: f64,
}

/// How a finite UI probe sequence behaves near its end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UiTrend {
    /// Nondecreasing over the last quarter and above where it started:
    /// tails drift away from zero, so the family is not uniformly integrable.
    NonUi,
    /// Nonincreasing over the last quarter and essentially zero at the end.
    TendsToZero,
    /// Neither; a finite probe cannot certify uniform integrability.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UiProbe {
    pub x: f64,
    /// `E[Z_l 1{Z_l > x}]` for `l = 0..=max_level`.
    pub values: Vec<f64>,
    pub trend: UiTrend,
}

const VANISHING: f64 = 1e-6;

fn classify_trend(values: &[f64]) -> UiTrend {
    let (Some(&first), Some(&last)) = (values.first(), values.last()) else {
        return UiTrend::Indeterminate;
    };
    let window = &values[values.len() - (values.len() / 4).max(2).min(values.len())..];
    let nondecreasing = window.windows(2).all(|w| w[1] >= w[0]);
    let nonincreasing = window.windows(2).all(|w| w[1] <= w[0]);
    if nonincreasing && last < VANISHING {
        UiTrend::TendsToZero
    } else if nondecreasing && last > first && last >= VANISHING {
        UiTrend::NonUi
    } else {
        UiTrend::Indeterminate
    }
}

/// Tail expectations at a fixed truncation point `x > 1` along the levels.
pub fn ui_probe<F: LevelFamily + ?Sized>(family: &F, x: f64, max_level: usize) -> Result<UiProbe> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::InvalidProbePoint(x));
    }
    family.check_depth(max_level)?;
    let values: Vec<f64> = (0..=max_level)
        .map(|l| lindeberg_tail(family, l, x).value)
        .collect();
    let trend = classify_trend(&values);
    Ok(UiProbe { x, values, trend })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceRatioPoint {
    pub epsilon: f64,
    pub finest_level: usize,
    /// `Var(A_ML) / eps^2`.
    pub ratio: f64,
}

/// Validates a positive, strictly decreasing tolerance grid.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    let positive = grid.iter().all(|e| e.is_finite() && *e > 0.0);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if grid.is_empty() || !positive || !decreasing {
        return Err(Error::InvalidGrid);
    }
    Ok(())
}

pub fn variance_ratio_sweep<F: LevelFamily + ?Sized>(
    family: &F,
    grid: &[f64],
) -> Result<Vec<VarianceRatioPoint>> {
    check_grid(grid)?;
    grid.iter()
        .map(|&epsilon| {
            let plan = family.plan(epsilon)?;
            Ok(VarianceRatioPoint {
                epsilon,
                finest_level: plan.finest_level(),
                ratio: variance_ratio(&plan),
            })
        })
        .collect()
}

/// Thresholds that declare the failure mechanism witnessed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessCriteria {
    /// Samples requested on the finest level when choosing each tolerance.
    pub last_level_samples: u64,
    /// Bound on `M_L` across targets.
    pub max_last_samples: u64,
    pub min_share: f64,
    pub max_share: f64,
    pub nu: f64,
    pub min_lindeberg: f64,
}

impl Default for WitnessCriteria {
    fn default() -> Self {
        Self {
            last_level_samples: 2,
            max_last_samples: 4,
            min_share: 0.2,
            max_share: 0.8,
            nu: 0.25,
            min_lindeberg: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessRow {
    pub target_level: usize,
    pub epsilon: f64,
    pub last_samples: u64,
    /// `V_L / (M_L Var A_ML)`.
    pub last_share: f64,
    pub lindeberg_total: f64,
    pub variance_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureWitness {
    pub criteria: WitnessCriteria,
    pub rows: Vec<WitnessRow>,
    /// Every row meets every criterion.
    pub witnessed: bool,
}

/// A tolerance `eps` with `L(eps) = target` whose allocation gives the finest
/// level exactly `samples` draws.
///
/// `M_L = ceil(eps^{-2} sqrt(V_L / C_L) S_L)`, so `eps` is solved from a
/// continuous allocation slightly below `samples`.
pub fn witness_epsilon<F: LevelFamily + ?Sized>(
    family: &F,
    target: usize,
    samples: u64,
) -> Result<f64> {
    let none = || Error::NoWitnessTolerance { target, samples };
    if samples == 0 {
        return Err(none());
    }
    let schedule = family.schedule(target)?;
    let s = *level_sums(&schedule).last().expect("schedule has a level");
    let (v, c) = (schedule.variances()[target], schedule.costs()[target]);
    for slack in [1e-6, 1e-4, 1e-2] {
        let x = samples as f64 * (1.0 - slack);
        let epsilon = ((v / c).sqrt() * s / x).sqrt();
        let Ok(plan) = family.plan(epsilon) else {
            continue;
        };
        if plan.finest_level() == target && plan.samples()[target] == samples {
            return Ok(epsilon);
        }
    }
    Err(none())
}

/// Shows that with `gamma > 2 alpha = beta` the finest level keeps a bounded
/// number of samples, a fixed share of the variance and a non-vanishing
/// Lindeberg sum as the tolerance shrinks.
pub fn failure_witness(
    family: &HeavyFailureFamily,
    targets: &[usize],
    criteria: WitnessCriteria,
) -> Result<FailureWitness> {
    check_nu(criteria.nu)?;
    if targets.is_empty() {
        return Err(Error::Config(
            "failure witness needs at least one target level".into(),
        ));
    }
    let rows = targets
        .iter()
        .map(|&target| {
            let epsilon = witness_epsilon(family, target, criteria.last_level_samples)?;
            let plan = family.plan(epsilon)?;
            let last_samples = plan.samples()[target];
            let last_share = plan.schedule().variances()[target]
                / (last_samples as f64 * plan.predicted_variance());
            let lindeberg_total = lindeberg_sum(family, &plan, criteria.nu)?.total;
            Ok(WitnessRow {
                target_level: target,
                epsilon,
                last_samples,
                last_share,
                lindeberg_total,
                variance_ratio: variance_ratio(&plan),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let witnessed = rows.iter().all(|r| {
        r.last_samples <= criteria.max_last_samples
            && (criteria.min_share..=criteria.max_share).contains(&r.last_share)
            && r.lindeberg_total >= criteria.min_lindeberg
    });
    Ok(FailureWitness {
        criteria,
        rows,
        witnessed,
    })
}

/// Everything [`crate::cli`] reports for one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub family: String,
    pub regime: Regime,
    pub lindeberg: Vec<LindebergReport>,
    pub lim_cond: Vec<LimCondPoint>,
    pub ui_probe: Option<UiProbe>,
    pub variance_ratios: Vec<VarianceRatioPoint>,
    pub failure_witness: Option<FailureWitness>,
}

/// What to sweep in [`DiagnosticsReport::build`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRequest {
    pub epsilon_grid: Vec<f64>,
    pub nu: Vec<f64>,
    pub lim_cond_levels: Vec<usize>,
    /// `(x, max_level)`.
    pub ui_probe: Option<(f64, usize)>,
}

impl DiagnosticsReport {
    pub fn build<F: LevelFamily + ?Sized>(
        family: &F,
        request: &DiagnosticsRequest,
    ) -> Result<Self> {
        check_grid(&request.epsilon_grid)?;
        if request.nu.is_empty() {
            return Err(Error::Config("nu list must not be empty".into()));
        }
        for &nu in &request.nu {
            check_nu(nu)?;
        }
        let plans = request
            .epsilon_grid
            .iter()
            .map(|&e| family.plan(e))
            .collect::<Result<Vec<_>>>()?;
        let mut lindeberg = Vec::with_capacity(plans.len() * request.nu.len());
        for &nu in &request.nu {
            for plan in &plans {
                lindeberg.push(lindeberg_sum(family, plan, nu)?);
            }
        }
        let mut lim_cond = Vec::new();
        for &nu in &request.nu {
            for &level in &request.lim_cond_levels {
                lim_cond.push(LimCondPoint {
                    level,
                    nu,
                    value: lim_cond_term(family, level, nu)?,
                });
            }
        }
        let ui_probe = request
            .ui_probe
            .map(|(x, max_level)| ui_probe(family, x, max_level))
            .transpose()?;
        Ok(Self {
            family: family.name().to_owned(),
            regime: family.rates().regime(&family.tail_descriptor()),
            lindeberg,
            lim_cond,
            ui_probe,
            variance_ratios: variance_ratio_sweep(family, &request.epsilon_grid)?,
            failure_witness: None,
        })
    }

    /// Lindeberg totals at `nu`, in grid order.
    pub fn lindeberg_totals(&self, nu: f64) -> Vec<f64> {
        self.lindeberg
            .iter()
            .filter(|r| r.nu == nu)
            .map(|r| r.total)
            .collect()
    }
}
