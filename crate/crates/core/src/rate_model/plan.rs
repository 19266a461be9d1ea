use serde::Serialize;

use super::RateTriplet;
use crate::error::{Error, Result};
use crate::numeric::{ceil_ratio_of_products, snapped_ceil, CompensatedSum};

/// Per-level variances `V_l` and costs `C_l` for levels `0..=L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSchedule {
    variances: Vec<f64>,
    costs: Vec<f64>,
}

impl LevelSchedule {
    /// Validated schedule: equal non-empty lengths, `V_l >= 0`, `C_l > 0` and `V_0 > 0`.
    pub fn new(variances: Vec<f64>, costs: Vec<f64>) -> Result<Self> {
        let schedule = Self::degenerate(variances, costs)?;
        if schedule.variances[0] <= 0.0 {
            return Err(Error::InvalidSchedule(
                "the coarsest level must have positive variance".into(),
            ));
        }
        Ok(schedule)
    }

    /// Like [`LevelSchedule::new`] but accepts `V_0 = 0`, for families whose
    /// increments are deterministic. Plans built on such schedules may have a
    /// zero predicted variance.
    pub fn degenerate(variances: Vec<f64>, costs: Vec<f64>) -> Result<Self> {
        if variances.is_empty() {
            return Err(Error::InvalidSchedule("no levels".into()));
        }
        if variances.len() != costs.len() {
            return Err(Error::InvalidSchedule(format!(
                "{} variances but {} costs",
                variances.len(),
                costs.len()
            )));
        }
        if let Some(l) = variances.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidSchedule(format!(
                "variance at level {l} is {}",
                variances[l]
            )));
        }
        if let Some(l) = costs.iter().position(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::InvalidSchedule(format!(
                "cost at level {l} is {}",
                costs[l]
            )));
        }
        Ok(Self { variances, costs })
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Number of levels, `L + 1`.
    pub fn len(&self) -> usize {
        self.variances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variances.is_empty()
    }

    /// Finest level index `L`.
    pub fn finest_level(&self) -> usize {
        self.variances.len() - 1
    }
}

/// Number of levels `L(eps) = max(ceil(ln(c_alpha / eps) / alpha), 1)`.
pub fn num_levels(epsilon: f64, rates: &RateTriplet) -> Result<usize> {
    check_epsilon(epsilon)?;
    let raw = (rates.c_alpha().ln() - epsilon.ln()) / rates.alpha();
    let levels = snapped_ceil(raw).max(1.0);
    if levels > u32::MAX as f64 {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    Ok(levels as usize)
}

/// Partial sums `S_k = sum_{l <= k} sqrt(V_l C_l)`.
pub fn level_sums(schedule: &LevelSchedule) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    schedule
        .variances
        .iter()
        .zip(&schedule.costs)
        .map(|(v, c)| {
            acc.add((v * c).sqrt());
            acc.value()
        })
        .collect()
}

/// Samples per level, `M_l = max(ceil(eps^-2 sqrt(V_l / C_l) S_L), 1)`.
///
/// Zero-variance levels get one sample.
pub fn sample_allocation(epsilon: f64, schedule: &LevelSchedule) -> Result<Vec<u64>> {
    check_epsilon(epsilon)?;
    let s_total = *level_sums(schedule).last().expect("schedule is non-empty");
    allocate(epsilon, schedule, s_total)
}

fn allocate(epsilon: f64, schedule: &LevelSchedule, s_total: f64) -> Result<Vec<u64>> {
    schedule
        .variances
        .iter()
        .zip(&schedule.costs)
        .enumerate()
        .map(|(level, (v, c))| {
            let ratio = (v / c).sqrt();
            let m = ceil_ratio_of_products(ratio, s_total, epsilon, epsilon)
                .ok_or(Error::AllocationOverflow { level })?
                .max(1.0);
            if m >= u64::MAX as f64 {
                return Err(Error::AllocationOverflow { level });
            }
            Ok(m as u64)
        })
        .collect()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// A fully resolved MLMC plan for one tolerance `eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorPlan {
    epsilon: f64,
    schedule: LevelSchedule,
    samples: Vec<u64>,
    partial_sums: Vec<f64>,
    total_samples: u64,
    predicted_variance: f64,
}

impl EstimatorPlan {
    /// Plan over an explicit schedule; the finest level is `schedule.len() - 1`.
    pub fn from_schedule(epsilon: f64, schedule: LevelSchedule) -> Result<Self> {
        check_epsilon(epsilon)?;
        let partial_sums = level_sums(&schedule);
        let samples = allocate(epsilon, &schedule, *partial_sums.last().unwrap())?;
        let total_samples = samples
            .iter()
            .try_fold(0u64, |acc, &m| acc.checked_add(m))
            .ok_or(Error::AllocationOverflow {
                level: schedule.finest_level(),
            })?;
        let predicted_variance = schedule
            .variances
            .iter()
            .zip(&samples)
            .map(|(v, &m)| v / m as f64)
            .collect::<CompensatedSum>()
            .value();
        Ok(Self {
            epsilon,
            schedule,
            samples,
            partial_sums,
            total_samples,
            predicted_variance,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Finest level `L`.
    pub fn finest_level(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn schedule(&self) -> &LevelSchedule {
        &self.schedule
    }

    /// `M_0 .. M_L`.
    pub fn samples(&self) -> &[u64] {
        &self.samples
    }

    /// `S_0 .. S_L`.
    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }

    /// `n(eps) = sum_l M_l`.
    pub fn total_samples(&self) -> u64 {
        self.total_samples
    }

    /// `Var(A_ML) = sum_l V_l / M_l`.
    pub fn predicted_variance(&self) -> f64 {
        self.predicted_variance
    }

    /// `sum_l M_l C_l`.
    pub fn total_cost(&self) -> f64 {
        self.samples
            .iter()
            .zip(&self.schedule.costs)
            .map(|(&m, c)| m as f64 * c)
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn is_degenerate(&self) -> bool {
        self.predicted_variance == 0.0
    }
}

/// Builds the plan for `eps`: `L` from the rates, then `V_l` and `C_l` from
/// `schedule_at(l)` for `l = 0..=L`.
pub fn make_plan<F>(epsilon: f64, rates: &RateTriplet, mut schedule_at: F) -> Result<EstimatorPlan>
where
    F: FnMut(usize) -> (f64, f64),
{
    let finest = num_levels(epsilon, rates)?;
    let (variances, costs) = (0..=finest).map(&mut schedule_at).unzip();
    EstimatorPlan::from_schedule(epsilon, LevelSchedule::new(variances, costs)?)
}

/// `Var(A_ML) / eps^2`. At most one for every plan.
pub fn variance_ratio(plan: &EstimatorPlan) -> f64 {
    plan.predicted_variance / (plan.epsilon * plan.epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule(v: &[f64], c: &[f64]) -> LevelSchedule {
        LevelSchedule::new(v.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn num_levels_examples() {
        let unit = RateTriplet::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(num_levels((-3.0f64).exp(), &unit).unwrap(), 3);
        let r = RateTriplet::new(0.5, 0.5, 0.5, 2.0).unwrap();
        assert_eq!(num_levels(1.0, &r).unwrap(), 2);
        assert_eq!(num_levels(10.0, &unit).unwrap(), 1);
    }

    #[test]
    fn num_levels_rejects_bad_epsilon() {
        let unit = RateTriplet::new(1.0, 1.0, 1.0, 1.0).unwrap();
        for eps in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                num_levels(eps, &unit),
                Err(Error::InvalidEpsilon(_))
            ));
        }
    }

    #[test]
    fn level_sums_examples() {
        assert_eq!(
            level_sums(&schedule(&[1.0, 0.25, 0.0625], &[1.0, 4.0, 16.0])),
            vec![1.0, 2.0, 3.0]
        );
        assert_eq!(
            level_sums(&schedule(&[1.0, 0.0, 1.0], &[1.0, 1.0, 1.0])),
            vec![1.0, 1.0, 2.0]
        );
        assert_eq!(level_sums(&schedule(&[4.0], &[9.0])), vec![6.0]);
    }

    #[test]
    fn allocation_examples() {
        let s = schedule(&[1.0, 0.25], &[1.0, 4.0]);
        assert_eq!(sample_allocation(0.1, &s).unwrap(), vec![200, 50]);
        let s = schedule(&[1.0, 0.0], &[1.0, 1.0]);
        assert_eq!(sample_allocation(0.1, &s).unwrap(), vec![100, 1]);
        let s = schedule(&[1.0], &[1.0]);
        assert_eq!(sample_allocation(10.0, &s).unwrap(), vec![1]);
    }

    #[test]
    fn plan_examples() {
        let plan = EstimatorPlan::from_schedule(0.1, schedule(&[1.0, 0.25], &[1.0, 4.0])).unwrap();
        assert!((plan.predicted_variance() - 0.01).abs() < 1e-17);
        assert!((variance_ratio(&plan) - 1.0).abs() < 1e-14);
        assert_eq!(plan.total_samples(), 250);

        let plan = EstimatorPlan::from_schedule(0.3, schedule(&[1.0], &[1.0])).unwrap();
        assert_eq!(plan.samples(), &[12]);
        assert!((plan.predicted_variance() - 1.0 / 12.0).abs() < 1e-16);
        assert!((variance_ratio(&plan) - 0.925_925_925_925_925_9).abs() < 1e-12);
    }

    #[test]
    fn make_plan_uses_num_levels() {
        let rates = RateTriplet::new(1.0, 2.0, 1.0, 1.0).unwrap();
        let eps = 0.01;
        let plan = make_plan(eps, &rates, |l| ((-2.0 * l as f64).exp(), (l as f64).exp())).unwrap();
        assert_eq!(plan.finest_level(), num_levels(eps, &rates).unwrap());
        assert_eq!(plan.total_samples(), plan.samples().iter().sum::<u64>());
        assert!(plan.predicted_variance() <= eps * eps);
    }

    #[test]
    fn schedule_validation() {
        assert!(LevelSchedule::new(vec![], vec![]).is_err());
        assert!(LevelSchedule::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(LevelSchedule::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(LevelSchedule::new(vec![1.0, -1.0], vec![1.0, 1.0]).is_err());
        assert!(LevelSchedule::new(vec![1.0], vec![0.0]).is_err());
        assert!(LevelSchedule::degenerate(vec![0.0, 0.0], vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn degenerate_plan_has_zero_variance() {
        let s = LevelSchedule::degenerate(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        let plan = EstimatorPlan::from_schedule(0.1, s).unwrap();
        assert_eq!(plan.samples(), &[1, 1]);
        assert!(plan.is_degenerate());
        assert_eq!(plan.total_cost(), 3.0);
    }
}
