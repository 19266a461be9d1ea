//! Multilevel Monte Carlo estimation with a laboratory for its central
//! limit behaviour.
//!
//! [`rate_model`] turns rate constants and a level schedule into an
//! estimator plan, [`families`] supplies hierarchies with exact moments,
//! [`engine`] runs seeded replications, [`diagnostics`] evaluates Lindeberg
//! sums and related quantities, [`stats_tests`] measures normality and [`cli`]
//! drives everything from a JSON config.

pub mod cli;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod families;
mod numeric;
pub mod rate_model;
pub mod stats_tests;

pub use error::{Error, Result};
pub use families::LevelFamily;
pub use rate_model::{EstimatorPlan, LevelSchedule, RateTriplet};
