//! `lse-hedge`: demand and price fitting, optimal hedges, preference
//! boundaries and saddle checks for a load-serving entity.

pub mod commands;
pub mod config;
pub mod failure;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use hedge_core::boundaries::BoundaryPair;
use hedge_core::oracle::SaddlePair;

use crate::config::RunConfig;
use crate::failure::{Failure, Tag};

#[derive(Parser)]
#[command(
    name = "lse-hedge",
    version,
    about = "Hedging decisions for a load-serving entity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Fit the linear-exponential demand density to aggregated meter data.
    FitDemand {
        #[arg(long)]
        meters: PathBuf,
        /// Meters per aggregated customer group.
        #[arg(long)]
        group_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Histogram bins for the density diagnostic.
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a log-normal spot price density conditioned on the previous hour.
    FitPrices {
        #[arg(long)]
        lmp: PathBuf,
        /// Threshold on the previous hour's price, USD/MWh.
        #[arg(long)]
        xi: f64,
        /// Require the previous price to exceed `xi` strictly.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal decision and expected profit for every configured instrument.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Cross-check against a numeric optimum and a Monte Carlo estimate.
        #[arg(long)]
        validate: bool,
        /// Include the tail-expectation form of each optimal profit.
        #[arg(long)]
        cvar: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Preference boundary between two instruments over a 2-D grid.
    Boundary {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        pair: PairArg,
        /// `name:lo:hi:steps`
        #[arg(long)]
        axis1: String,
        /// `name:lo:hi:steps`
        #[arg(long)]
        axis2: String,
        /// CSV path; a JSON sidecar is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stationary points of the two-instrument portfolio profit.
    Saddle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        pair: SaddleArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PairArg {
    ForwardVsCall,
    DrVsForward,
    DrVsCall,
}

impl From<PairArg> for BoundaryPair {
    fn from(p: PairArg) -> Self {
        match p {
            PairArg::ForwardVsCall => BoundaryPair::ForwardVsCall,
            PairArg::DrVsForward => BoundaryPair::DrVsForward,
            PairArg::DrVsCall => BoundaryPair::DrVsCall,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SaddleArg {
    ForwardCall,
    ForwardDr,
    CallDr,
}

impl From<SaddleArg> for SaddlePair {
    fn from(p: SaddleArg) -> Self {
        match p {
            SaddleArg::ForwardCall => SaddlePair::ForwardCall,
            SaddleArg::ForwardDr => SaddlePair::ForwardDr,
            SaddleArg::CallDr => SaddlePair::CallDr,
        }
    }
}

fn load(path: &Path, out: Option<PathBuf>) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(path).config()?;
    if out.is_some() {
        cfg.out = out;
    }
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::FitDemand {
            meters,
            group_size,
            seed,
            bins,
            out,
        } => commands::fit_demand(commands::FitDemandArgs {
            meters: &meters,
            group_size,
            seed,
            bins,
            out: out.as_deref(),
        }),
        Command::FitPrices {
            lmp,
            xi,
            strict,
            out,
        } => commands::fit_prices(commands::FitPricesArgs {
            lmp: &lmp,
            xi,
            strict,
            out: out.as_deref(),
        }),
        Command::Optimize {
            config,
            seed,
            validate,
            cvar,
            out,
        } => {
            let mut cfg = load(&config, out)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            commands::optimize(&cfg, validate, cvar)
        }
        Command::Boundary {
            config,
            pair,
            axis1,
            axis2,
            out,
        } => {
            let cfg = load(&config, out)?;
            let a1 = commands::parse_axis(&axis1)?;
            let a2 = commands::parse_axis(&axis2)?;
            commands::boundary(&cfg, pair.into(), a1, a2)
        }
        Command::Saddle { config, pair, out } => {
            let cfg = load(&config, out)?;
            commands::saddle(&cfg, pair.into())
        }
    }
}
