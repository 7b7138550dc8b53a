use std::path::Path;

use log::warn;

use riskrank::partition::io::{read_partition_file, write_partition_file};
use riskrank::partition::{recursive_partition, PartitionSet, PartitionSummary};

use crate::commands::build::read_graphs;
use crate::config::RunConfig;
use crate::error::{CliError, Outcome};
use crate::files::{self, join};

/// Partitions the projection found in `graphs`. `max_size` / `min_size` are
/// used unless the configuration sets them.
pub fn cmd_partition(
    cfg: &RunConfig,
    graphs: &Path,
    out: &Path,
    max_size: usize,
    min_size: usize,
) -> Result<(PartitionSummary, Outcome), CliError> {
    let config = cfg.partition.resolve(max_size, min_size);
    config.validate().map_err(CliError::input)?;
    let g = read_graphs(graphs)?;
    let set = recursive_partition(&g.projection, &config).map_err(CliError::input)?;

    let mut outcome = Outcome::default();
    for (id, reason) in set.warnings() {
        warn!("partition {id} kept whole: {reason}");
        outcome.partial.push(format!("partition {id} not bisected: {reason}"));
    }
    files::ensure_dir(out)?;
    let path = join(out, files::PARTITIONS);
    write_partition_file(files::create(&path)?, &set).map_err(|e| CliError::io(&path, e))?;
    let summary = set.summary();
    files::write_json(&join(out, files::PARTITION_SUMMARY), &summary)?;
    Ok((summary, outcome))
}

pub fn read_partitions(path: &Path) -> Result<PartitionSet, CliError> {
    read_partition_file(files::open(path)?).map_err(|e| CliError::io(path, e))
}
