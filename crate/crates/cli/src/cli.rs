//! Command-line definitions. Every flag is optional and overrides the value
//! from `--config` (or the built-in default listed in its help).

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use crate::config::{AlgorithmChoice, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "riskrank", version, about = "Risk propagation on company director networks")]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads for (partition, fold) runs [default: available parallelism].
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Seed of the fold assignment [default: 1].
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the company-person graph and its company projection from register records.
    Build(BuildCmd),
    /// Split the company projection into partitions by recursive spectral bisection.
    Partition(PartitionCmd),
    /// Cross-validated PageRank / BiRank scores and evaluation.
    Rank(RankCmd),
    /// Time repeated cross-validated runs of both algorithms on one partition set.
    Bench(BenchCmd),
    /// Write a synthetic register with known risk.
    Generate(GenerateCmd),
    /// Run generate, build, partition and rank end to end and check the expected effects.
    Reproduce(ReproduceCmd),
}

fn set<T>(dst: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *dst = v;
    }
}

#[derive(Debug, Args)]
pub struct BuildCmd {
    /// Register file with columns person_id, company_id, role, start_date, end_date.
    #[arg(long, value_name = "FILE")]
    pub records: PathBuf,
    /// Label file with columns entity_id, risk.
    #[arg(long, value_name = "FILE")]
    pub risk: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// First day of the observation window [default: 1991-01-01].
    #[arg(long, value_name = "DATE")]
    pub window_start: Option<NaiveDate>,
    /// End of the observation window [default: 2021-01-01].
    #[arg(long, value_name = "DATE")]
    pub window_end: Option<NaiveDate>,
    /// Field delimiter of the input files [default: ,].
    #[arg(long, value_name = "CHAR")]
    pub delimiter: Option<char>,
    /// Upper bound of an edge weight in years [default: 30].
    #[arg(long, value_name = "N")]
    pub max_weight: Option<u32>,
}

impl BuildCmd {
    pub fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.window.start, self.window_start);
        set(&mut cfg.window.end, self.window_end);
        set(&mut cfg.input.delimiter, self.delimiter);
        set(&mut cfg.build.max_weight, self.max_weight);
    }
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Pieces with at least this many companies are bisected [default: 50000; reproduce: 1000].
    #[arg(long, value_name = "N")]
    pub max_size: Option<usize>,
    /// Final pieces with fewer companies are dropped [default: 50; reproduce: 10].
    #[arg(long, value_name = "N")]
    pub min_size: Option<usize>,
    /// Residual tolerance of the Fiedler vector [default: 1e-8].
    #[arg(long, value_name = "X")]
    pub fiedler_tol: Option<f64>,
    /// Matrix-vector product budget per Fiedler solve [default: 10000].
    #[arg(long, value_name = "N")]
    pub fiedler_max_iter: Option<usize>,
    /// Block size of the Fiedler eigensolver [default: 1].
    #[arg(long, value_name = "N")]
    pub fiedler_block: Option<usize>,
}

impl PartitionArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.partition;
        p.max_size = self.max_size.or(p.max_size);
        p.min_size = self.min_size.or(p.min_size);
        p.tol = self.fiedler_tol.or(p.tol);
        p.max_iter = self.fiedler_max_iter.or(p.max_iter);
        p.block_size = self.fiedler_block.or(p.block_size);
    }
}

#[derive(Debug, Args)]
pub struct PartitionCmd {
    /// Directory written by `build`.
    #[arg(long, value_name = "DIR")]
    pub graphs: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[command(flatten)]
    pub partition: PartitionArgs,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Algorithms to run [default: both].
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmChoice>,
    /// PageRank damping [default: 0.85].
    #[arg(long, value_name = "X")]
    pub pagerank_alpha: Option<f64>,
    /// PageRank stopping threshold on the L2 change [default: 1e-8].
    #[arg(long, value_name = "X")]
    pub pagerank_epsilon: Option<f64>,
    /// PageRank iteration cap [default: 1000].
    #[arg(long, value_name = "N")]
    pub pagerank_max_iter: Option<usize>,
    /// BiRank company-side weight [default: 0.85].
    #[arg(long, value_name = "X")]
    pub birank_alpha: Option<f64>,
    /// BiRank person-side weight [default: 0.85].
    #[arg(long, value_name = "X")]
    pub birank_beta: Option<f64>,
    /// BiRank stopping threshold on the joint L1 change [default: 1e-8].
    #[arg(long, value_name = "X")]
    pub birank_epsilon: Option<f64>,
    /// BiRank iteration cap [default: 1000].
    #[arg(long, value_name = "N")]
    pub birank_max_iter: Option<usize>,
    /// Cross-validation folds [default: 10].
    #[arg(long, value_name = "K")]
    pub folds: Option<usize>,
    /// Target-chart bins [default: 20].
    #[arg(long, value_name = "N")]
    pub bins: Option<usize>,
    /// Points of the precision/recall curve [default: 100].
    #[arg(long, value_name = "N")]
    pub pr_steps: Option<usize>,
}

impl RankArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.algorithm, self.algorithm);
        set(&mut cfg.pagerank.alpha, self.pagerank_alpha);
        set(&mut cfg.pagerank.epsilon, self.pagerank_epsilon);
        set(&mut cfg.pagerank.max_iter, self.pagerank_max_iter);
        set(&mut cfg.birank.alpha, self.birank_alpha);
        set(&mut cfg.birank.beta, self.birank_beta);
        set(&mut cfg.birank.epsilon, self.birank_epsilon);
        set(&mut cfg.birank.max_iter, self.birank_max_iter);
        set(&mut cfg.cv.folds, self.folds);
        set(&mut cfg.eval.bin_count, self.bins);
        set(&mut cfg.eval.pr_steps, self.pr_steps);
    }
}

#[derive(Debug, Args)]
pub struct RankCmd {
    /// Directory written by `build`.
    #[arg(long, value_name = "DIR")]
    pub graphs: PathBuf,
    /// Partition file written by `partition`.
    #[arg(long, value_name = "FILE")]
    pub partitions: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[command(flatten)]
    pub rank: RankArgs,
}

#[derive(Debug, Args)]
pub struct BenchCmd {
    /// Directory written by `build`.
    #[arg(long, value_name = "DIR")]
    pub graphs: PathBuf,
    /// Partition file written by `partition`.
    #[arg(long, value_name = "FILE")]
    pub partitions: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Timed runs per algorithm [default: 20].
    #[arg(long, value_name = "N")]
    pub repetitions: Option<usize>,
    #[command(flatten)]
    pub rank: RankArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Companies [default: 6000].
    #[arg(long, value_name = "N")]
    pub companies: Option<usize>,
    /// Ordinary persons [default: 10000].
    #[arg(long, value_name = "N")]
    pub persons: Option<usize>,
    /// Hub directors [default: 20].
    #[arg(long, value_name = "N")]
    pub hubs: Option<usize>,
    /// Companies per hub director [default: 80].
    #[arg(long, value_name = "N")]
    pub hub_degree: Option<usize>,
    /// Risk contagion strength between companies sharing a director [default: 0.6].
    #[arg(long, value_name = "X")]
    pub homophily: Option<f64>,
    /// Share of companies that are risky before contagion [default: 0.03].
    #[arg(long, value_name = "X")]
    pub base_rate: Option<f64>,
    /// Share of companies with a published label [default: 0.8].
    #[arg(long, value_name = "X")]
    pub label_coverage: Option<f64>,
    /// Generator seed [default: 20210101].
    #[arg(long, value_name = "N")]
    pub gen_seed: Option<u64>,
}

impl GenArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let g = &mut cfg.generate;
        set(&mut g.n_companies, self.companies);
        set(&mut g.n_persons, self.persons);
        set(&mut g.hub_count, self.hubs);
        set(&mut g.hub_degree, self.hub_degree);
        set(&mut g.homophily, self.homophily);
        set(&mut g.base_rate, self.base_rate);
        set(&mut g.label_coverage, self.label_coverage);
        set(&mut g.seed, self.gen_seed);
    }
}

#[derive(Debug, Args)]
pub struct GenerateCmd {
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[command(flatten)]
    pub gen: GenArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceCmd {
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[command(flatten)]
    pub gen: GenArgs,
    #[command(flatten)]
    pub partition: PartitionArgs,
    #[command(flatten)]
    pub rank: RankArgs,
}

impl Cli {
    /// Configuration file values with this invocation's flags applied.
    pub fn resolve(&self, mut cfg: RunConfig) -> RunConfig {
        set(&mut cfg.threads, self.threads);
        set(&mut cfg.seed, self.seed);
        match &self.command {
            Command::Build(c) => c.apply(&mut cfg),
            Command::Partition(c) => c.partition.apply(&mut cfg),
            Command::Rank(c) => c.rank.apply(&mut cfg),
            Command::Bench(c) => {
                set(&mut cfg.bench.repetitions, c.repetitions);
                c.rank.apply(&mut cfg);
            }
            Command::Generate(c) => c.gen.apply(&mut cfg),
            Command::Reproduce(c) => {
                c.gen.apply(&mut cfg);
                c.partition.apply(&mut cfg);
                c.rank.apply(&mut cfg);
            }
        }
        cfg
    }
}
