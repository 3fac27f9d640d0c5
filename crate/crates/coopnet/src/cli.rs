//! Command-line surface and its resolution into a [`RunSpec`].

use std::path::PathBuf;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use coopnet_core::{Dpc, SimMode, SystemParams};

use crate::config::ConfigFile;
use crate::error::{CliError, Result};
use crate::grid::{parse_rho, parse_thresholds, RhoPoint};

#[derive(Debug, Parser)]
#[command(name = "coopnet", version, about = "Coverage of Poisson cellular networks with pairwise base-station cooperation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic coverage on a threshold × ρ grid.
    Analytic(Options),
    /// Monte Carlo coverage on a threshold × ρ grid.
    Simulate(Options),
    /// Optimal ρ per threshold, next to the ρ = 1 baseline.
    Optimize(Options),
    /// Analytic sweep, optionally with simulated and reference rows.
    Sweep(Options),
    /// Run the invariant checks and report each one.
    Validate(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Shotnoise,
    Fullvoronoi,
}

impl From<ModeArg> for SimMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Shotnoise => SimMode::ShotNoise,
            ModeArg::Fullvoronoi => SimMode::FullVoronoi,
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    /// Flat key = value file; flags take precedence.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Station density λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Path-loss exponent β (> 2).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Transmit power p.
    #[arg(long)]
    pub power: Option<f64>,
    /// Noise power σ².
    #[arg(long)]
    pub noise: Option<f64>,

    /// Threshold grid: `start:stop:logN`, `start:stop:linN` or `a,b,c`.
    #[arg(long, visible_alias = "thresholds", value_name = "GRID")]
    pub threshold: Option<String>,
    /// Read thresholds in dB.
    #[arg(long)]
    pub db: bool,
    /// ρ grid; the list may contain `optimal`.
    #[arg(long, value_name = "GRID")]
    pub rho: Option<String>,

    /// Dirty-paper cancellation of the second station.
    #[arg(long, action = ArgAction::Set, value_name = "BOOL")]
    pub dpc: Option<bool>,
    /// Apply cancellation to users served alone as well.
    #[arg(long)]
    pub dpc_both_terms: bool,

    /// Monte Carlo realizations per ρ.
    #[arg(long)]
    pub realizations: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Simulate in a window of area 20/λ without far-field correction.
    #[arg(long)]
    pub compact_window: bool,

    /// `sweep` only: append Monte Carlo rows for every numeric ρ.
    #[arg(long)]
    pub with_simulation: bool,
    /// `sweep` and `analytic`: append classical nearest-station rows.
    #[arg(long)]
    pub with_reference: bool,

    /// Write 0 in the runtime column so output is byte-identical across runs.
    #[arg(long)]
    pub no_timing: bool,
    /// CSV destination; stdout when absent.
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Analytic,
    Simulate,
    Optimize,
    Sweep,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub mode: SimMode,
    pub realizations: u64,
    pub seed: u64,
    pub compact_window: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub kind: Kind,
    /// Threshold field holds the first grid value.
    pub params: SystemParams,
    pub thresholds: Vec<f64>,
    pub rho: Vec<RhoPoint>,
    pub dpc: Dpc,
    pub sim: SimSettings,
    pub with_simulation: bool,
    pub with_reference: bool,
    pub timing: bool,
    pub output: Option<PathBuf>,
}

pub const DEFAULT_REALIZATIONS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 1;
const FIGURE_THRESHOLDS: &str = "0.1:10:log21";

impl Command {
    pub fn resolve(&self) -> Result<RunSpec> {
        let (kind, opts) = match self {
            Command::Analytic(o) => (Kind::Analytic, o),
            Command::Simulate(o) => (Kind::Simulate, o),
            Command::Optimize(o) => (Kind::Optimize, o),
            Command::Sweep(o) => (Kind::Sweep, o),
            Command::Validate(o) => (Kind::Validate, o),
        };
        let file = match &opts.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let (t_default, rho_default) = match kind {
            Kind::Analytic | Kind::Simulate => ("1", "1"),
            Kind::Optimize => (FIGURE_THRESHOLDS, "optimal"),
            Kind::Sweep => (FIGURE_THRESHOLDS, "0,1,optimal"),
            Kind::Validate => ("0.1,0.5,1,2,5", "0,0.5,1"),
        };
        let pick = |flag: Option<f64>, key: &str, default: f64| -> Result<f64> {
            Ok(flag.or(file.value(key)?).unwrap_or(default))
        };
        let flag_or_file = |flag: bool, key: &str| -> Result<bool> { Ok(flag || file.value(key)?.unwrap_or(false)) };

        let db = flag_or_file(opts.db, "db")?;
        let t_text = opts.threshold.as_deref().or(file.text("threshold")).unwrap_or(t_default);
        let thresholds = parse_thresholds(t_text, db)?;
        let rho_text = opts.rho.as_deref().or(file.text("rho")).unwrap_or(rho_default);
        let rho = parse_rho(rho_text)?;
        if kind == Kind::Simulate && rho.contains(&RhoPoint::Optimal) {
            return Err(CliError::usage("`simulate` needs numeric rho values"));
        }

        let params = SystemParams::new(
            pick(opts.lambda, "lambda", 1.0)?,
            pick(opts.beta, "beta", 4.0)?,
            pick(opts.power, "power", 1.0)?,
            pick(opts.noise, "noise", 1.0)?,
            thresholds[0],
        )
        .map_err(|e| CliError::usage(e.to_string()))?;

        let dpc_on = opts.dpc.or(file.value("dpc")?).unwrap_or(false);
        let dpc = Dpc::from_flags(dpc_on, flag_or_file(opts.dpc_both_terms, "dpc_both_terms")?);

        let mode = match opts.mode {
            Some(m) => m,
            None => match file.text("mode") {
                None => ModeArg::Shotnoise,
                Some(m) => ModeArg::from_str(m, true).map_err(|_| CliError::usage(format!("config: unknown mode `{m}`")))?,
            },
        };
        let realizations = opts.realizations.or(file.value("realizations")?).unwrap_or(DEFAULT_REALIZATIONS);
        if realizations == 0 {
            return Err(CliError::usage("realizations must be at least 1"));
        }
        let sim = SimSettings {
            mode: mode.into(),
            realizations,
            seed: opts.seed.or(file.value("seed")?).unwrap_or(DEFAULT_SEED),
            compact_window: flag_or_file(opts.compact_window, "compact_window")?,
        };

        Ok(RunSpec {
            kind,
            params,
            thresholds,
            rho,
            dpc,
            sim,
            with_simulation: opts.with_simulation,
            with_reference: opts.with_reference,
            timing: !opts.no_timing,
            output: opts.output.clone(),
        })
    }
}
