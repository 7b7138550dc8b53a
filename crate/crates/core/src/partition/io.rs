//! Partition assignment file: `company_id,partition_id,dropped_flag`.
//! Dropped companies have an empty `partition_id` and flag `1`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::graph::io::GraphIoError;

use super::{Partition, PartitionError, PartitionSet};

#[derive(Debug, thiserror::Error)]
pub enum PartitionIoError {
    #[error(transparent)]
    Io(#[from] GraphIoError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

fn malformed(row: &csv::StringRecord, message: impl Into<String>) -> PartitionIoError {
    GraphIoError::Malformed {
        line: row.position().map_or(0, |p| p.line()),
        message: message.into(),
    }
    .into()
}

/// Rows are sorted by company id.
pub fn write_partition_file<W: Write>(w: W, set: &PartitionSet) -> Result<(), PartitionIoError> {
    let mut rows: Vec<(&str, Option<usize>)> = set
        .partitions
        .iter()
        .enumerate()
        .flat_map(|(pid, p)| p.companies.iter().map(move |c| (c.as_str(), Some(pid))))
        .chain(set.dropped.iter().map(|c| (c.as_str(), None)))
        .collect();
    rows.sort();
    let mut wtr = csv::Writer::from_writer(w);
    let wrap = |e: csv::Error| PartitionIoError::Io(e.into());
    wtr.write_record(["company_id", "partition_id", "dropped_flag"]).map_err(wrap)?;
    for (company, pid) in rows {
        let (pid, flag) = match pid {
            Some(p) => (p.to_string(), "0"),
            None => (String::new(), "1"),
        };
        wtr.write_record([company, pid.as_str(), flag]).map_err(wrap)?;
    }
    wtr.flush().map_err(|e| wrap(e.into()))?;
    Ok(())
}

/// Provenance is not part of the file; partitions come back without it.
pub fn read_partition_file<R: Read>(r: R) -> Result<PartitionSet, PartitionIoError> {
    let mut by_id: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    let mut dropped = Vec::new();
    for row in csv::Reader::from_reader(r).records() {
        let row = row.map_err(|e| PartitionIoError::Io(e.into()))?;
        if row.len() != 3 {
            return Err(malformed(&row, "expected company_id,partition_id,dropped_flag"));
        }
        match (row[1].trim(), row[2].trim()) {
            ("", "1") => dropped.push(row[0].to_string()),
            (pid, "0") => {
                let pid: usize = pid.parse().map_err(|_| malformed(&row, format!("bad partition_id `{pid}`")))?;
                by_id.entry(pid).or_default().push(row[0].to_string());
            }
            _ => return Err(malformed(&row, "dropped rows need an empty partition_id and flag 1, retained rows flag 0")),
        }
    }
    let partitions = by_id
        .into_values()
        .map(|companies| Partition { companies, provenance: None })
        .collect();
    Ok(PartitionSet::new(partitions, dropped)?)
}
