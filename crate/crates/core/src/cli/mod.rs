//! Config-driven entry point behind the `mlmc-clt` binary.
//!
//! Subcommands `plan`, `simulate`, `diagnose` and `regime` read one JSON
//! config and write reports to the output directory:
//!
//! | file | command |
//! |------|---------|
//! | `plan.json` | `plan` |
//! | `samples.csv`, `normality.json`, `qq.csv` | `simulate` |
//! | `diagnostics.json` | `diagnose` |
//!
//! `regime` prints its classification to stdout. Exit code 0 means success,
//! 1 a runtime failure and 2 a rejected config or inadmissible rates.

mod config;

pub use config::{
    BuiltFamily, ExperimentConfig, FamilySpec, RateOverride, UiProbeSpec, WitnessSpec, DEFAULT_GRID,
};

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::diagnostics::{failure_witness, DiagnosticsReport};
use crate::engine::{run_experiment, run_experiment_with_threads, Experiment};
use crate::error::{Error, Result};
use crate::families::LevelFamily;
use crate::rate_model::{variance_ratio, EstimatorPlan, RateTriplet, Regime};
use crate::stats_tests::{qq_points, write_qq_csv, NormalityReport};

/// Below this many replications `simulate` warns that normality statistics
/// are unreliable.
pub const MIN_RECOMMENDED_REPLICATIONS: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "mlmc-clt",
    version,
    about = "MLMC plans, simulations and CLT diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Level count, sample allocation and predicted variance.
    Plan(CommonArgs),
    /// Replicate the estimator and test its normalization against N(0, 1).
    Simulate(CommonArgs),
    /// Lindeberg sums, limit-condition terms, UI probe and variance ratios.
    Diagnose(CommonArgs),
    /// Print the CLT regime of the configured rates.
    Regime(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; overrides `threads`.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overrides `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run `plan` or `simulate` once per point of `epsilon_grid`.
    #[arg(long)]
    pub sweep: bool,
}

/// Exit status for an error: 2 for anything the user must fix in the
/// config, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::AllocationOverflow { .. } | Error::NonFiniteSample(_) => 1,
        Error::EmptySample | Error::NoWitnessTolerance { .. } => 1,
        _ => 2,
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

type Runner = fn(&ExperimentConfig, &Path, bool) -> Result<()>;

pub fn execute(command: &Command) -> Result<()> {
    let (args, run): (&CommonArgs, Runner) = match command {
        Command::Plan(a) => (a, |c, out, sweep| write_plan(c, out, sweep)),
        Command::Simulate(a) => (a, |c, out, sweep| write_simulation(c, out, sweep)),
        Command::Diagnose(a) => (a, |c, out, _| write_diagnostics(c, out)),
        Command::Regime(a) => (a, |c, _, _| print_regime(c)),
    };
    let config = load_config(args)?;
    let out = output_dir(&config, args);
    run(&config, &out, args.sweep)
}

/// Reads the config and applies command-line overrides.
pub fn load_config(args: &CommonArgs) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(threads) = args.threads {
        config.threads = Some(threads);
    }
    if let Some(out) = &args.out {
        config.output_dir = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn output_dir(config: &ExperimentConfig, args: &CommonArgs) -> PathBuf {
    args.out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("mlmc-out"))
}

/// Everything `plan.json` holds for one tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanReport {
    pub family: String,
    pub rates: RateTriplet,
    pub regime: Regime,
    pub epsilon: f64,
    #[serde(rename = "L")]
    pub finest_level: usize,
    #[serde(rename = "M")]
    pub samples: Vec<u64>,
    #[serde(rename = "S")]
    pub partial_sums: Vec<f64>,
    #[serde(rename = "V")]
    pub variances: Vec<f64>,
    #[serde(rename = "C")]
    pub costs: Vec<f64>,
    #[serde(rename = "n")]
    pub total_samples: u64,
    pub predicted_variance: f64,
    pub variance_ratio: f64,
    pub total_cost: f64,
    pub fine_mean: f64,
}

impl PlanReport {
    pub fn new(family: &dyn LevelFamily, plan: &EstimatorPlan) -> Self {
        let schedule = plan.schedule();
        Self {
            family: family.name().to_owned(),
            rates: family.rates(),
            regime: family.rates().regime(&family.tail_descriptor()),
            epsilon: plan.epsilon(),
            finest_level: plan.finest_level(),
            samples: plan.samples().to_vec(),
            partial_sums: plan.partial_sums().to_vec(),
            variances: schedule.variances().to_vec(),
            costs: schedule.costs().to_vec(),
            total_samples: plan.total_samples(),
            predicted_variance: plan.predicted_variance(),
            variance_ratio: variance_ratio(plan),
            total_cost: plan.total_cost(),
            fine_mean: family.fine_mean(plan.finest_level()),
        }
    }
}

pub fn cmd_plan(config: &ExperimentConfig) -> Result<PlanReport> {
    let built = config.build_family()?;
    let family = built.as_family();
    let plan = family.plan(config.epsilon()?)?;
    Ok(PlanReport::new(family, &plan))
}

fn sweep_configs(config: &ExperimentConfig) -> Vec<ExperimentConfig> {
    config
        .grid()
        .into_iter()
        .map(|eps| ExperimentConfig {
            epsilon: Some(eps),
            ..config.clone()
        })
        .collect()
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes `plan.json`: one report, or an array of reports with `--sweep`.
pub fn write_plan(config: &ExperimentConfig, out: &Path, sweep: bool) -> Result<()> {
    fs::create_dir_all(out)?;
    let path = out.join("plan.json");
    if sweep {
        let reports = sweep_configs(config)
            .iter()
            .map(cmd_plan)
            .collect::<Result<Vec<_>>>()?;
        write_json(&path, &reports)
    } else {
        write_json(&path, &cmd_plan(config)?)
    }
}

/// Contents of `normality.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityDocument {
    pub family: String,
    pub epsilon: f64,
    #[serde(rename = "L")]
    pub finest_level: usize,
    pub replications: usize,
    pub seed: u64,
    pub fine_mean: f64,
    pub predicted_variance: f64,
    pub estimate_mean: f64,
    /// Zero predicted variance: nothing to normalize, no normality report.
    pub degenerate: bool,
    pub normality: Option<NormalityReport>,
}

/// Result of [`cmd_simulate`].
pub struct Simulation {
    pub experiment: Experiment,
    pub document: NormalityDocument,
    /// Normalized values, empty when degenerate.
    pub samples: Vec<f64>,
}

pub fn cmd_simulate(config: &ExperimentConfig) -> Result<Simulation> {
    let built = config.build_family()?;
    let family = built.as_family();
    let plan = family.plan(config.epsilon()?)?;
    if config.replications < MIN_RECOMMENDED_REPLICATIONS {
        eprintln!(
            "warning: {} replications; normality statistics need at least {}",
            config.replications, MIN_RECOMMENDED_REPLICATIONS
        );
    }
    let experiment = match config.threads {
        Some(t) => run_experiment_with_threads(family, &plan, config.replications, config.seed, t)?,
        None => run_experiment(family, &plan, config.replications, config.seed)?,
    };
    let samples = if experiment.degenerate {
        Vec::new()
    } else {
        experiment.normalized()
    };
    let normality = if experiment.degenerate {
        None
    } else {
        Some(NormalityReport::from_samples(&samples)?)
    };
    let document = NormalityDocument {
        family: family.name().to_owned(),
        epsilon: plan.epsilon(),
        finest_level: plan.finest_level(),
        replications: config.replications,
        seed: config.seed,
        fine_mean: experiment.fine_mean,
        predicted_variance: experiment.predicted_variance,
        estimate_mean: experiment.estimate_moments.mean(),
        degenerate: experiment.degenerate,
        normality,
    };
    Ok(Simulation {
        experiment,
        document,
        samples,
    })
}

/// Writes `samples.csv` (one normalized value per line, 17 significant
/// digits), `normality.json` and `qq.csv`. With `--sweep` each tolerance
/// goes to its own `eps-<index>` subdirectory.
pub fn write_simulation(config: &ExperimentConfig, out: &Path, sweep: bool) -> Result<()> {
    if sweep {
        for (i, c) in sweep_configs(config).iter().enumerate() {
            write_simulation(c, &out.join(format!("eps-{i}")), false)?;
        }
        return Ok(());
    }
    fs::create_dir_all(out)?;
    let sim = cmd_simulate(config)?;
    let mut w = BufWriter::new(File::create(out.join("samples.csv"))?);
    for z in &sim.samples {
        writeln!(w, "{z:.16e}")?;
    }
    w.flush()?;
    write_json(&out.join("normality.json"), &sim.document)?;
    let points = if sim.samples.is_empty() {
        Vec::new()
    } else {
        qq_points(&sim.samples)?
    };
    let mut w = BufWriter::new(File::create(out.join("qq.csv"))?);
    write_qq_csv(&points, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_diagnose(config: &ExperimentConfig) -> Result<DiagnosticsReport> {
    let built = config.build_family()?;
    let family = built.as_family();
    let request = config.diagnostics_request(family.max_level());
    let mut report = DiagnosticsReport::build(family, &request)?;
    if let Some(heavy) = built.heavy() {
        let spec = config.witness.clone().unwrap_or_default();
        report.failure_witness = Some(failure_witness(heavy, &spec.targets, spec.criteria())?);
    }
    Ok(report)
}

pub fn write_diagnostics(config: &ExperimentConfig, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    write_json(&out.join("diagnostics.json"), &cmd_diagnose(config)?)
}

pub fn cmd_regime(config: &ExperimentConfig) -> Result<Regime> {
    let built = config.build_family()?;
    let family = built.as_family();
    Ok(family.rates().regime(&family.tail_descriptor()))
}

fn print_regime(config: &ExperimentConfig) -> Result<()> {
    let regime = cmd_regime(config)?;
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, &regime)?;
    writeln!(stdout)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_model::RegimeKind;

    fn config(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    #[test]
    fn partition_plan_levels() {
        let r = cmd_plan(&config(
            r#"{"family": {"kind": "partition"}, "epsilon": 0.01}"#,
        ))
        .unwrap();
        let c_alpha = r.rates.c_alpha();
        let expected = ((c_alpha * 100.0).ln() / 0.75).ceil() as usize;
        assert_eq!(r.finest_level, expected);
        assert_eq!(r.finest_level, 6);
        assert_eq!(r.regime.kind, RegimeKind::BalancedConditional);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["L"], 6);
    }

    #[test]
    fn coarse_tolerance_is_one_level() {
        let r = cmd_plan(&config(
            r#"{"family": {"kind": "partition"}, "epsilon": 10}"#,
        ))
        .unwrap();
        assert_eq!(r.finest_level, 1);
        assert!(r.samples.iter().all(|&m| m == 1));
    }

    #[test]
    fn constant_family_is_degenerate() {
        let sim = cmd_simulate(&config(
            r#"{"family": {"kind": "constant", "values": [1, 0.5],
                "rates": {"alpha": 1, "beta": 1, "gamma": 1, "c_alpha": 1}},
                "epsilon": 0.5, "replications": 100}"#,
        ))
        .unwrap();
        assert!(sim.document.degenerate);
        assert!(sim.samples.is_empty());
        assert!(sim.document.normality.is_none());
        assert_eq!(sim.document.estimate_mean, 1.5);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidNu(0.0)), 2);
        assert_eq!(
            exit_code(&Error::InadmissibleRates {
                min: 1.0,
                two_alpha: 0.2
            }),
            2
        );
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), 1);
    }
}
