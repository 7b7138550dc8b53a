//! One function per subcommand. Each takes the resolved configuration and
//! explicit paths, writes its files and returns a summary.

pub mod bench;
pub mod build;
pub mod generate;
pub mod partition;
pub mod rank;
pub mod reproduce;

pub use bench::{cmd_bench, BenchReport};
pub use build::{cmd_build, BuildSummary};
pub use generate::{cmd_generate, GenerateSummary};
pub use partition::cmd_partition;
pub use rank::{cmd_rank, RankReport, RankRun};
pub use reproduce::{cmd_reproduce, ReproduceReport, Reproduction};
