//! Run configuration: built-in defaults, then an optional TOML file, then
//! command-line flags.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use riskrank::datagen::{paper_shape_preset, GenConfig};
use riskrank::eval::EvalOptions;
use riskrank::graph::{BuildConfig, DEFAULT_MAX_WEIGHT};
use riskrank::partition::{FiedlerOptions, PartitionConfig};
use riskrank::ranking::{BiRankParams, PageRankParams};
use riskrank::record::ObservationWindow;

use crate::error::CliError;

/// Partition thresholds used by `reproduce` when none are configured: the
/// 50000 / 50 defaults scaled to a register of a few thousand companies.
pub const REPRODUCE_MAX_SIZE: usize = 1000;
pub const REPRODUCE_MIN_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmChoice {
    Pagerank,
    Birank,
    Both,
}

impl AlgorithmChoice {
    pub fn pagerank(self) -> bool {
        matches!(self, AlgorithmChoice::Pagerank | AlgorithmChoice::Both)
    }

    pub fn birank(self) -> bool {
        matches!(self, AlgorithmChoice::Birank | AlgorithmChoice::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowSection {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Default for WindowSection {
    fn default() -> Self {
        let w = ObservationWindow::default();
        WindowSection { start: w.start(), end: w.end() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    /// Single-byte field delimiter of record and risk files.
    pub delimiter: char,
}

impl Default for InputSection {
    fn default() -> Self {
        InputSection { delimiter: ',' }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildSection {
    pub max_weight: u32,
}

impl Default for BuildSection {
    fn default() -> Self {
        BuildSection { max_weight: DEFAULT_MAX_WEIGHT }
    }
}

/// Unset thresholds fall back to the command's own defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionSection {
    pub max_size: Option<usize>,
    pub min_size: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub block_size: Option<usize>,
}

impl PartitionSection {
    pub fn resolve(&self, max_size: usize, min_size: usize) -> PartitionConfig {
        let f = FiedlerOptions::default();
        PartitionConfig {
            max_size: self.max_size.unwrap_or(max_size),
            min_size: self.min_size.unwrap_or(min_size),
            fiedler: FiedlerOptions {
                tol: self.tol.unwrap_or(f.tol),
                max_iter: self.max_iter.unwrap_or(f.max_iter),
                block_size: self.block_size.unwrap_or(f.block_size),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSection {
    pub folds: usize,
}

impl Default for CvSection {
    fn default() -> Self {
        CvSection { folds: riskrank::crossval::DEFAULT_FOLDS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub repetitions: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection { repetitions: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads for (partition × fold) runs; 0 = available parallelism.
    pub threads: usize,
    pub algorithm: AlgorithmChoice,
    pub window: WindowSection,
    pub input: InputSection,
    pub build: BuildSection,
    pub partition: PartitionSection,
    pub pagerank: PageRankParams,
    pub birank: BiRankParams,
    pub cv: CvSection,
    pub eval: EvalOptions,
    pub bench: BenchSection,
    pub generate: GenConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            threads: 0,
            algorithm: AlgorithmChoice::Both,
            window: WindowSection::default(),
            input: InputSection::default(),
            build: BuildSection::default(),
            partition: PartitionSection::default(),
            pagerank: PageRankParams::default(),
            birank: BiRankParams::default(),
            cv: CvSection::default(),
            eval: EvalOptions::default(),
            bench: BenchSection::default(),
            generate: paper_shape_preset(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))
    }

    pub fn window(&self) -> Result<ObservationWindow, CliError> {
        ObservationWindow::new(self.window.start, self.window.end).map_err(CliError::input)
    }

    pub fn delimiter(&self) -> Result<u8, CliError> {
        let d = self.input.delimiter;
        if !d.is_ascii() {
            return Err(CliError::input(format!("delimiter `{d}` must be a single ASCII character")));
        }
        Ok(d as u8)
    }

    pub fn build_config(&self) -> Result<BuildConfig, CliError> {
        if self.build.max_weight == 0 {
            return Err(CliError::input("max_weight must be at least 1"));
        }
        Ok(BuildConfig { max_weight: self.build.max_weight })
    }

    /// Checks every parameter the selected commands may use.
    pub fn validate(&self) -> Result<(), CliError> {
        self.window()?;
        self.delimiter()?;
        self.build_config()?;
        self.pagerank.validate().map_err(|e| CliError::input(format!("pagerank: {e}")))?;
        self.birank.validate().map_err(|e| CliError::input(format!("birank: {e}")))?;
        if self.cv.folds < 2 {
            return Err(CliError::input(format!("folds must be at least 2, got {}", self.cv.folds)));
        }
        if self.eval.bin_count < 2 || self.eval.pr_steps == 0 {
            return Err(CliError::input("eval bin_count must be >= 2 and pr_steps >= 1"));
        }
        Ok(())
    }
}
