use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{check_grid, DiagnosticsRequest, WitnessCriteria};
use crate::error::{Error, Result};
use crate::families::{
    ConstantFamily, GaussianFamily, HeavyFailureFamily, LevelFamily, PartitionFamily, SampleStream,
};
use crate::rate_model::{RateTriplet, TailDescriptor};

/// One experiment, read from a single JSON document. Unknown keys are
/// rejected everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: FamilySpec,
    /// Replaces the family's rate constants for planning and classification.
    /// The level variances still come from the family.
    #[serde(default)]
    pub rates: Option<RateTriplet>,
    /// Tolerance for `plan` and `simulate`.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Strictly decreasing tolerances for `diagnose` and `--sweep`.
    /// Defaults to `[1e-1, 1e-2, 1e-3]`.
    #[serde(default)]
    pub epsilon_grid: Option<Vec<f64>>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_nu")]
    pub nu: Vec<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Levels at which the limit-condition term is reported.
    #[serde(default = "default_lim_cond_levels")]
    pub lim_cond_levels: Vec<usize>,
    #[serde(default)]
    pub ui_probe: Option<UiProbeSpec>,
    /// Only valid for `heavy_failure`; a witness with defaults is always
    /// produced for that family.
    #[serde(default)]
    pub witness: Option<WitnessSpec>,
}

fn default_replications() -> usize {
    1000
}

fn default_nu() -> Vec<f64> {
    vec![0.25, 1.0, 4.0]
}

fn default_lim_cond_levels() -> Vec<usize> {
    vec![5, 10, 20, 40]
}

pub const DEFAULT_GRID: [f64; 3] = [1e-1, 1e-2, 1e-3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UiProbeSpec {
    pub x: f64,
    pub max_level: usize,
}

impl Default for UiProbeSpec {
    fn default() -> Self {
        Self {
            x: 2.0,
            max_level: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSpec {
    #[serde(default = "default_targets")]
    pub targets: Vec<usize>,
    #[serde(default = "default_last_samples")]
    pub last_level_samples: u64,
    #[serde(default = "default_max_last_samples")]
    pub max_last_samples: u64,
}

fn default_targets() -> Vec<usize> {
    (8..=16).collect()
}

fn default_last_samples() -> u64 {
    WitnessCriteria::default().last_level_samples
}

fn default_max_last_samples() -> u64 {
    WitnessCriteria::default().max_last_samples
}

impl Default for WitnessSpec {
    fn default() -> Self {
        Self {
            targets: default_targets(),
            last_level_samples: default_last_samples(),
            max_last_samples: default_max_last_samples(),
        }
    }
}

impl WitnessSpec {
    pub fn criteria(&self) -> WitnessCriteria {
        WitnessCriteria {
            last_level_samples: self.last_level_samples,
            max_last_samples: self.max_last_samples,
            ..WitnessCriteria::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Partition {
        #[serde(default = "default_p")]
        p: f64,
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default = "default_half")]
        gamma: f64,
    },
    Gaussian {
        #[serde(default = "default_one")]
        mu0: f64,
        #[serde(default = "default_one")]
        v0: f64,
        #[serde(default = "default_one")]
        alpha: f64,
        #[serde(default = "default_one")]
        beta: f64,
        #[serde(default = "default_half")]
        gamma: f64,
    },
    HeavyFailure {
        #[serde(default = "heavy_alpha")]
        alpha: f64,
        #[serde(default = "heavy_gamma")]
        gamma: f64,
        #[serde(default = "heavy_beta")]
        beta: f64,
        #[serde(default = "heavy_q0")]
        q0: f64,
        #[serde(default = "heavy_jump_rate")]
        jump_rate: f64,
    },
    Constant {
        values: Vec<f64>,
        rates: RateTriplet,
    },
}

fn default_p() -> f64 {
    (-1.0f64).exp()
}
fn default_eta() -> f64 {
    0.25
}
fn default_half() -> f64 {
    0.5
}
fn default_one() -> f64 {
    1.0
}
fn heavy_alpha() -> f64 {
    HeavyFailureFamily::DEFAULT_ALPHA
}
fn heavy_gamma() -> f64 {
    HeavyFailureFamily::DEFAULT_GAMMA
}
fn heavy_beta() -> f64 {
    HeavyFailureFamily::DEFAULT_BETA
}
fn heavy_q0() -> f64 {
    HeavyFailureFamily::DEFAULT_Q0
}
fn heavy_jump_rate() -> f64 {
    HeavyFailureFamily::DEFAULT_JUMP_RATE
}

/// A family built from a config, possibly with overridden rates.
pub enum BuiltFamily {
    Partition(PartitionFamily),
    Gaussian(GaussianFamily),
    HeavyFailure(HeavyFailureFamily),
    Constant(ConstantFamily),
    Overridden(RateOverride),
}

impl BuiltFamily {
    pub fn as_family(&self) -> &dyn LevelFamily {
        match self {
            Self::Partition(f) => f,
            Self::Gaussian(f) => f,
            Self::HeavyFailure(f) => f,
            Self::Constant(f) => f,
            Self::Overridden(f) => f,
        }
    }

    pub fn heavy(&self) -> Option<&HeavyFailureFamily> {
        match self {
            Self::HeavyFailure(f) => Some(f),
            _ => None,
        }
    }
}

/// Wraps a family with different rate constants. Costs follow the new
/// `gamma`; analytic tail facts are dropped since they belong to the
/// original rates.
pub struct RateOverride {
    inner: Box<dyn LevelFamily>,
    rates: RateTriplet,
}

impl LevelFamily for RateOverride {
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn rates(&self) -> RateTriplet {
        self.rates
    }
    fn delta_mean(&self, level: usize) -> f64 {
        self.inner.delta_mean(level)
    }
    fn delta_var(&self, level: usize) -> f64 {
        self.inner.delta_var(level)
    }
    fn sample_delta(&self, level: usize, stream: &mut SampleStream) -> f64 {
        self.inner.sample_delta(level, stream)
    }
    fn sample_level_sum(&self, level: usize, count: u64, stream: &mut SampleStream) -> f64 {
        self.inner.sample_level_sum(level, count, stream)
    }
    fn lindeberg_tail(&self, level: usize, threshold: f64) -> Option<f64> {
        self.inner.lindeberg_tail(level, threshold)
    }
    fn tail_descriptor(&self) -> TailDescriptor {
        TailDescriptor::default()
    }
    fn max_level(&self) -> Option<usize> {
        self.inner.max_level()
    }
    fn schedule(&self, finest: usize) -> Result<crate::rate_model::LevelSchedule> {
        self.check_depth(finest)?;
        let (v, c) = (0..=finest)
            .map(|l| (self.delta_var(l), self.cost(l)))
            .unzip();
        // keep whatever V_0 convention the wrapped family uses
        match self.inner.schedule(0)?.variances()[0] {
            v0 if v0 > 0.0 => crate::rate_model::LevelSchedule::new(v, c),
            _ => crate::rate_model::LevelSchedule::degenerate(v, c),
        }
    }
}

impl FamilySpec {
    pub fn build(&self) -> Result<Box<dyn LevelFamily>> {
        Ok(match self.build_concrete()? {
            BuiltFamily::Partition(f) => Box::new(f),
            BuiltFamily::Gaussian(f) => Box::new(f),
            BuiltFamily::HeavyFailure(f) => Box::new(f),
            BuiltFamily::Constant(f) => Box::new(f),
            BuiltFamily::Overridden(f) => Box::new(f),
        })
    }

    fn build_concrete(&self) -> Result<BuiltFamily> {
        Ok(match *self {
            Self::Partition { p, eta, gamma } => {
                BuiltFamily::Partition(PartitionFamily::new(p, eta, gamma)?)
            }
            Self::Gaussian {
                mu0,
                v0,
                alpha,
                beta,
                gamma,
            } => BuiltFamily::Gaussian(GaussianFamily::new(mu0, v0, alpha, beta, gamma)?),
            Self::HeavyFailure {
                alpha,
                gamma,
                beta,
                q0,
                jump_rate,
            } => BuiltFamily::HeavyFailure(HeavyFailureFamily::new(
                alpha, gamma, beta, q0, jump_rate,
            )?),
            Self::Constant { ref values, rates } => {
                BuiltFamily::Constant(ConstantFamily::new(values.clone(), rates)?)
            }
        })
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks everything that does not need a built family.
    pub fn validate(&self) -> Result<()> {
        if let Some(eps) = self.epsilon {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::InvalidEpsilon(eps));
            }
        }
        if let Some(grid) = &self.epsilon_grid {
            check_grid(grid)?;
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.nu.is_empty() {
            return Err(Error::Config("nu list must not be empty".into()));
        }
        if let Some(&nu) = self.nu.iter().find(|nu| !(nu.is_finite() && **nu > 0.0)) {
            return Err(Error::InvalidNu(nu));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if let Some(probe) = self.ui_probe {
            if !(probe.x > 1.0 && probe.x.is_finite()) {
                return Err(Error::InvalidProbePoint(probe.x));
            }
        }
        if self.witness.is_some() && !matches!(self.family, FamilySpec::HeavyFailure { .. }) {
            return Err(Error::Config(
                "witness is only defined for the heavy_failure family".into(),
            ));
        }
        if let Some(w) = &self.witness {
            if w.targets.is_empty() || w.last_level_samples == 0 {
                return Err(Error::Config(
                    "witness needs target levels and a positive sample count".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn build_family(&self) -> Result<BuiltFamily> {
        let built = self.family.build_concrete()?;
        match self.rates {
            None => Ok(built),
            Some(rates) => Ok(BuiltFamily::Overridden(RateOverride {
                inner: self.family.build()?,
                rates,
            })),
        }
    }

    pub fn epsilon(&self) -> Result<f64> {
        self.epsilon
            .ok_or_else(|| Error::Config("epsilon is required for this command".into()))
    }

    pub fn grid(&self) -> Vec<f64> {
        self.epsilon_grid
            .clone()
            .unwrap_or_else(|| DEFAULT_GRID.to_vec())
    }

    /// Diagnostic sweep settings, clipped to the family's deepest level.
    pub fn diagnostics_request(&self, max_level: Option<usize>) -> DiagnosticsRequest {
        let cap = max_level.unwrap_or(usize::MAX);
        let probe = self.ui_probe.unwrap_or_default();
        DiagnosticsRequest {
            epsilon_grid: self.grid(),
            nu: self.nu.clone(),
            lim_cond_levels: self
                .lim_cond_levels
                .iter()
                .copied()
                .filter(|&l| l <= cap)
                .collect(),
            ui_probe: Some((probe.x, probe.max_level.min(cap))),
        }
    }
}
