//! Level-coupled random variable families with exactly known moments.
//!
//! A family describes the increments `Delta_l X = X_l - X_{l-1}` of a
//! hierarchy: their exact means and variances, the cost of drawing one, and
//! the truncated second moment of the normalized square
//! `Z_l = |Delta_l X - E Delta_l X|^2 / V_l` (the "Lindeberg tail").
//! Families never hold random state; every draw comes from a stream supplied
//! by the caller.

mod constant;
mod gaussian;
mod heavy;
mod partition;

pub use constant::ConstantFamily;
pub use gaussian::{gaussian_lindeberg_tail, GaussianFamily};
pub use heavy::HeavyFailureFamily;
pub use partition::PartitionFamily;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::rate_model::{num_levels, EstimatorPlan, LevelSchedule, RateTriplet, TailDescriptor};

/// Random stream handed to families. Each stream is a keyed ChaCha8
/// instance, see [`crate::engine::level_stream`].
pub type SampleStream = rand_chacha::ChaCha8Rng;

pub trait LevelFamily: Send + Sync {
    /// Short identifier used in reports.
    fn name(&self) -> &str;

    fn rates(&self) -> RateTriplet;

    /// Exact `E[Delta_l X]`.
    fn delta_mean(&self, level: usize) -> f64;

    /// Exact `V_l = Var(Delta_l X)`.
    fn delta_var(&self, level: usize) -> f64;

    /// Cost of one sample of `Delta_l X`; `e^{gamma l}` unless overridden.
    fn cost(&self, level: usize) -> f64 {
        (self.rates().gamma() * level as f64).exp()
    }

    /// One realization of `Delta_l X`.
    fn sample_delta(&self, level: usize, stream: &mut SampleStream) -> f64;

    /// Sum of `count` independent realizations of `Delta_l X`.
    ///
    /// Families whose level sums have a closed-form law may override this
    /// with an exact draw from that law.
    fn sample_level_sum(&self, level: usize, count: u64, stream: &mut SampleStream) -> f64 {
        let mut sum = CompensatedSum::new();
        for _ in 0..count {
            sum.add(self.sample_delta(level, stream));
        }
        sum.value()
    }

    /// Exact `E[X_L] = sum_{l <= L} E[Delta_l X]`.
    fn fine_mean(&self, finest: usize) -> f64 {
        (0..=finest)
            .map(|l| self.delta_mean(l))
            .collect::<CompensatedSum>()
            .value()
    }

    /// Exact `E[Z_l 1{Z_l > t}]`, zero when `V_l = 0`. `None` when the family
    /// has no closed form.
    fn lindeberg_tail(&self, _level: usize, _threshold: f64) -> Option<f64> {
        None
    }

    /// Analytic facts for the regime classifier.
    fn tail_descriptor(&self) -> TailDescriptor {
        TailDescriptor::default()
    }

    /// Deepest level the family can produce, if bounded.
    fn max_level(&self) -> Option<usize> {
        None
    }

    /// `V_l`, `C_l` for `l = 0..=finest`.
    fn schedule(&self, finest: usize) -> Result<LevelSchedule> {
        self.check_depth(finest)?;
        let (v, c) = (0..=finest)
            .map(|l| (self.delta_var(l), self.cost(l)))
            .unzip();
        LevelSchedule::new(v, c)
    }

    /// The estimator plan for tolerance `epsilon` under this family's rates.
    fn plan(&self, epsilon: f64) -> Result<EstimatorPlan> {
        let finest = num_levels(epsilon, &self.rates())?;
        EstimatorPlan::from_schedule(epsilon, self.schedule(finest)?)
    }

    fn check_depth(&self, finest: usize) -> Result<()> {
        match self.max_level() {
            Some(max) if finest > max => Err(Error::PlanMismatch(format!(
                "family {} has levels up to {max}, plan needs {finest}",
                self.name()
            ))),
            _ => Ok(()),
        }
    }
}

/// `E[Z 1{Z > t}]` for a centered two-point increment that jumps with
/// probability `q`: the jump branch contributes `1 - q` when `(1 - q)/q > t`
/// and the other branch `q` when `q/(1 - q) > t`.
pub fn two_point_tail(q: f64, threshold: f64) -> f64 {
    let mut tail = 0.0;
    if (1.0 - q) / q > threshold {
        tail += 1.0 - q;
    }
    if q / (1.0 - q) > threshold {
        tail += q;
    }
    tail
}

pub(crate) fn bernoulli(stream: &mut SampleStream, q: f64) -> bool {
    stream.random::<f64>() < q
}
