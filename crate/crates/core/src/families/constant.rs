use super::{LevelFamily, SampleStream};
use crate::error::{Error, Result};
use crate::rate_model::{LevelSchedule, RateTriplet};

/// Deterministic increments `Delta_l X = c_l`. Every plan over this family has
/// zero predicted variance.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantFamily {
    values: Vec<f64>,
    rates: RateTriplet,
}

impl ConstantFamily {
    pub fn new(values: Vec<f64>, rates: RateTriplet) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidFamily("no levels".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFamily(format!(
                "value at level {i} is not finite"
            )));
        }
        Ok(Self { values, rates })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl LevelFamily for ConstantFamily {
    fn name(&self) -> &str {
        "constant"
    }

    fn rates(&self) -> RateTriplet {
        self.rates
    }

    fn delta_mean(&self, level: usize) -> f64 {
        self.values[level]
    }

    fn delta_var(&self, _level: usize) -> f64 {
        0.0
    }

    fn sample_delta(&self, level: usize, _stream: &mut SampleStream) -> f64 {
        self.values[level]
    }

    fn lindeberg_tail(&self, _level: usize, _threshold: f64) -> Option<f64> {
        Some(0.0)
    }

    fn max_level(&self) -> Option<usize> {
        Some(self.values.len() - 1)
    }

    fn schedule(&self, finest: usize) -> Result<LevelSchedule> {
        self.check_depth(finest)?;
        let costs = (0..=finest).map(|l| self.cost(l)).collect();
        LevelSchedule::degenerate(vec![0.0; finest + 1], costs)
    }
}
