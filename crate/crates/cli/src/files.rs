//! Output file names and small IO helpers shared by the commands.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub const RECORDS: &str = "records.csv";
pub const RISK: &str = "risk.csv";
pub const GROUND_TRUTH: &str = "ground_truth.csv";
pub const GENERATE_CONFIG: &str = "generate_config.json";

pub const BIPARTITE: &str = "bipartite.csv";
pub const PROJECTION: &str = "projection.csv";
pub const COMPANY_RISK: &str = "company_risk.csv";
pub const SURROGATES: &str = "surrogates.csv";
pub const GRAPH_STATS: &str = "graph_stats.json";

pub const PARTITIONS: &str = "partitions.csv";
pub const PARTITION_SUMMARY: &str = "partition_summary.json";

pub const FOLDS: &str = "folds.csv";
pub const RANK_TIMING: &str = "timing_rank.json";

pub const BENCH: &str = "bench.json";

pub const REPORT: &str = "report.json";
pub const REPRODUCE_TIMING: &str = "timing_reproduce.json";

pub fn scores(algorithm: &str) -> String {
    format!("scores_{algorithm}.csv")
}

pub fn metrics(algorithm: &str) -> String {
    format!("metrics_{algorithm}.json")
}

pub fn pr_curve(algorithm: &str) -> String {
    format!("pr_curve_{algorithm}.csv")
}

pub fn target_chart(algorithm: &str) -> String {
    format!("target_chart_{algorithm}.csv")
}

pub fn midranks(algorithm: &str) -> String {
    format!("midranks_{algorithm}.csv")
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::input)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes rows to a delimited file with a header.
pub fn write_table<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut wtr = csv::Writer::from_writer(create(path)?);
    let fail = |e: csv::Error| CliError::io(path, e);
    wtr.write_record(header).map_err(fail)?;
    for row in rows {
        wtr.write_record(row).map_err(fail)?;
    }
    wtr.flush().map_err(|e| CliError::io(path, e))
}

pub fn join(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
