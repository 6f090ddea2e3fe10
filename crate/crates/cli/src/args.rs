//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use subsimplex_core::synth::DEFAULT_SIZES;

use crate::config::{LogRatio, Method, Plots, RunConfig, Source, DEFAULT_PRECISION, PRECISION_ENV};
use crate::error::{CliError, Result};
use crate::output::{dataset_table, write_atomic, FloatFormat};
use crate::run::{replay, run, synthesize, Manifest};

#[derive(Debug, Parser)]
#[command(name = "subsimplex", version, about = "Principal subsimplex analysis of compositional data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one method and write scores, loadings, approximations and plots.
    Run(RunArgs),
    /// Write a simulated data set as CSV.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, required_unless_present = "manifest")]
    pub method: Option<Method>,
    /// CSV with a header row of part names.
    #[arg(long, conflicts_with = "example")]
    pub input: Option<PathBuf>,
    /// Header names of non-compositional columns, such as depth or labels.
    #[arg(long = "meta")]
    pub meta: Vec<String>,
    /// Use a simulated data set (1: four clusters, 2: plus three noise parts).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub example: Option<u8>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Four comma-separated cluster sizes of the simulated data.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// PSA-O grid points over the merge ratio.
    #[arg(long, default_value_t = subsimplex_core::psa_o::DEFAULT_GRID_POINTS)]
    pub grid: usize,
    /// Golden-section refinement around the best PSA-O grid point.
    #[arg(long)]
    pub refine: bool,
    /// Power-transform exponent.
    #[arg(long, default_value_t = 0.5)]
    pub exponent: f64,
    /// Zeros become this factor times the smallest nonzero entry.
    #[arg(long, default_value_t = 0.5)]
    pub zero_factor: f64,
    /// Skip rescaling rows after zero replacement.
    #[arg(long)]
    pub no_renormalize: bool,
    #[arg(long, value_enum, default_value_t = LogRatio::Clr)]
    pub logratio: LogRatio,
    /// Part label used as alr divisor (default: last part).
    #[arg(long)]
    pub alr_reference: Option<String>,
    /// Do not write ternary.svg.
    #[arg(long)]
    pub no_ternary: bool,
    /// Do not write scores.svg.
    #[arg(long)]
    pub no_scores_plot: bool,
    /// Metadata column used to color plots.
    #[arg(long)]
    pub color_by: Option<String>,
    /// Significant digits of floats in CSV outputs.
    #[arg(long, env = PRECISION_ENV, default_value_t = DEFAULT_PRECISION)]
    pub precision: usize,
    /// Repeat the run recorded in a manifest; only --out is used besides.
    #[arg(long, conflicts_with_all = ["method", "input", "example"])]
    pub manifest: Option<PathBuf>,
}

fn sizes(v: &Option<Vec<usize>>) -> Result<[usize; 4]> {
    match v {
        None => Ok(DEFAULT_SIZES),
        Some(v) => v.as_slice().try_into().map_err(|_| CliError::Config("--sizes takes four values".into())),
    }
}

impl RunArgs {
    pub fn to_config(&self) -> Result<RunConfig> {
        let method = self.method.ok_or_else(|| CliError::Config("--method is required".into()))?;
        let source = match (&self.input, self.example) {
            (Some(path), None) => Source::Csv { path: path.clone(), meta: self.meta.clone() },
            (None, Some(example)) => Source::Synthetic { example, seed: self.seed, sizes: sizes(&self.sizes)? },
            _ => return Err(CliError::Config("give exactly one of --input or --example".into())),
        };
        let config = RunConfig {
            method,
            source,
            out: self.out.clone(),
            grid_points: self.grid,
            refine: self.refine,
            exponent: self.exponent,
            zero_factor: self.zero_factor,
            renormalize: !self.no_renormalize,
            logratio: self.logratio,
            alr_reference: self.alr_reference.clone(),
            plots: Plots { ternary: !self.no_ternary, scores: !self.no_scores_plot },
            color_by: self.color_by.clone(),
            precision: self.precision,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// 1: four clusters, 2: plus three noise parts.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub example: u8,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Four comma-separated cluster sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Output CSV file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, env = PRECISION_ENV, default_value_t = DEFAULT_PRECISION)]
    pub precision: usize,
}

pub fn execute(cli: Cli) -> Result<Option<Manifest>> {
    match cli.command {
        Command::Run(args) => match &args.manifest {
            Some(path) => replay(path, args.out.clone()).map(Some),
            None => run(&args.to_config()?).map(Some),
        },
        Command::Synth(args) => {
            if !(1..=17).contains(&args.precision) {
                return Err(CliError::Config(format!("precision must be within 1..=17, got {}", args.precision)));
            }
            let s = sizes(&args.sizes)?;
            if s.contains(&0) {
                return Err(CliError::Config("cluster sizes must be positive".into()));
            }
            let ds = synthesize(args.example, args.seed, s)?;
            write_atomic(&args.out, &dataset_table(&ds, FloatFormat::new(args.precision)).to_bytes())?;
            Ok(None)
        }
    }
}
