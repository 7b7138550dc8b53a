use std::path::Path;

use serde::Serialize;

use riskrank::datagen::{generate, write_ground_truth, GenConfig};
use riskrank::record::{write_records, write_risk};

use crate::error::CliError;
use crate::files::{self, join};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerateSummary {
    pub records: usize,
    pub companies: usize,
    pub labeled: usize,
    pub labeled_risk: usize,
    pub true_risk: usize,
}

/// Writes a synthetic register: `records.csv`, `risk.csv` (published
/// labels), `ground_truth.csv` and the generator settings.
pub fn cmd_generate(gen: &GenConfig, out: &Path) -> Result<GenerateSummary, CliError> {
    let data = generate(gen).map_err(CliError::input)?;
    files::ensure_dir(out)?;
    let path = join(out, files::RECORDS);
    write_records(files::create(&path)?, &data.records, b',').map_err(|e| CliError::io(&path, e))?;
    let path = join(out, files::RISK);
    write_risk(files::create(&path)?, &data.risk, b',').map_err(|e| CliError::io(&path, e))?;
    let path = join(out, files::GROUND_TRUTH);
    write_ground_truth(files::create(&path)?, &data.truth).map_err(|e| CliError::io(&path, e))?;
    files::write_json(&join(out, files::GENERATE_CONFIG), gen)?;
    Ok(GenerateSummary {
        records: data.records.len(),
        companies: data.truth.len(),
        labeled: data.risk.len(),
        labeled_risk: data.risk.values().filter(|&&r| r).count(),
        true_risk: data.truth.iter().filter(|t| t.risk).count(),
    })
}
