//! Run configuration. A config echoed into a manifest fully determines the
//! outputs of a run; only the output directory is left out.

use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use subsimplex_core::benchmarks::transforms::TransformKind;
use subsimplex_core::synth::DEFAULT_SIZES;

use crate::error::{CliError, Result};

pub const DEFAULT_PRECISION: usize = 17;
pub const PRECISION_ENV: &str = "SUBSIMPLEX_PRECISION";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PsaS,
    PsaO,
    Pca,
    PowerPca,
    LogratioPca,
}

impl Method {
    pub fn is_psa(self) -> bool {
        matches!(self, Method::PsaS | Method::PsaO)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LogRatio {
    Clr,
    Alr,
    Ilr,
}

impl From<LogRatio> for TransformKind {
    fn from(l: LogRatio) -> Self {
        match l {
            LogRatio::Clr => TransformKind::Clr,
            LogRatio::Alr => TransformKind::Alr,
            LogRatio::Ilr => TransformKind::Ilr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Source {
    Csv { path: PathBuf, meta: Vec<String> },
    Synthetic { example: u8, seed: u64, sizes: [usize; 4] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plots {
    pub ternary: bool,
    pub scores: bool,
}

impl Default for Plots {
    fn default() -> Self {
        Self { ternary: true, scores: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub method: Method,
    pub source: Source,
    #[serde(skip)]
    pub out: PathBuf,
    /// PSA-O grid over the merge ratio.
    pub grid_points: usize,
    pub refine: bool,
    /// Power-transform exponent.
    pub exponent: f64,
    /// Zeros become this factor times the smallest nonzero entry (log-ratio only).
    pub zero_factor: f64,
    pub renormalize: bool,
    pub logratio: LogRatio,
    /// Part label used as the alr divisor; the last part when absent.
    pub alr_reference: Option<String>,
    pub plots: Plots,
    /// Metadata column used to color plots.
    pub color_by: Option<String>,
    /// Significant digits of floats in CSV outputs.
    pub precision: usize,
}

impl RunConfig {
    pub fn new(method: Method, source: Source, out: impl Into<PathBuf>) -> Self {
        Self {
            method,
            source,
            out: out.into(),
            grid_points: subsimplex_core::psa_o::DEFAULT_GRID_POINTS,
            refine: false,
            exponent: 0.5,
            zero_factor: 0.5,
            renormalize: true,
            logratio: LogRatio::Clr,
            alr_reference: None,
            plots: Plots::default(),
            color_by: None,
            precision: DEFAULT_PRECISION,
        }
    }

    pub fn synthetic(example: u8, seed: u64) -> Source {
        Source::Synthetic { example, seed, sizes: DEFAULT_SIZES }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.grid_points < 2 {
            return bad(format!("grid needs at least 2 points, got {}", self.grid_points));
        }
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return bad(format!("exponent must be positive, got {}", self.exponent));
        }
        if !(self.zero_factor > 0.0 && self.zero_factor.is_finite()) {
            return bad(format!("zero factor must be positive, got {}", self.zero_factor));
        }
        if !(1..=17).contains(&self.precision) {
            return bad(format!("precision must be within 1..=17, got {}", self.precision));
        }
        if self.alr_reference.is_some() && !(self.method == Method::LogratioPca && self.logratio == LogRatio::Alr) {
            return bad("--alr-reference only applies to alr log-ratio PCA".into());
        }
        if let Source::Synthetic { example, sizes, .. } = &self.source {
            if !(1..=2).contains(example) {
                return bad(format!("unknown example {example}; expected 1 or 2"));
            }
            if sizes.contains(&0) {
                return bad("cluster sizes must be positive".into());
            }
        }
        Ok(())
    }
}
