use std::path::Path;

use log::warn;
use serde::Serialize;

use riskrank::graph::io::{read_bipartite, read_company_risk, read_unipartite, write_bipartite, write_company_risk, write_surrogates, write_unipartite};
use riskrank::graph::{build_bipartite, project_unipartite, BipartiteGraph, GraphStats, RiskVector, UnipartiteGraph};
use riskrank::record::{read_records, read_risk, RiskLabels};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::files::{self, join};

#[derive(Debug, Clone, Serialize)]
pub struct BuildSummary {
    pub records: usize,
    pub parse_warnings: usize,
    pub skipped_records: usize,
    pub risk_entries: usize,
    pub unmatched_risk: usize,
    pub labeled_companies: usize,
    pub risk_companies: usize,
    pub surrogates: usize,
    pub bipartite: GraphStats,
    pub projection: GraphStats,
    /// Projected edges per bipartite edge; `None` for an empty graph.
    pub edge_ratio: Option<f64>,
}

/// Graphs and labels as written by `build`.
pub struct Graphs {
    pub bipartite: BipartiteGraph,
    pub projection: UnipartiteGraph,
    pub risk: RiskVector,
}

pub fn cmd_build(cfg: &RunConfig, records: &Path, risk: Option<&Path>, out: &Path) -> Result<BuildSummary, CliError> {
    let window = cfg.window()?;
    let delimiter = cfg.delimiter()?;
    let build = cfg.build_config()?;

    let parsed = read_records(files::open(records)?, delimiter).map_err(|e| CliError::io(records, e))?;
    for w in &parsed.warnings {
        warn!("{}:{}: {}", records.display(), w.line, w.message);
    }
    if parsed.records.is_empty() {
        warn!("{}: no usable records; writing empty graphs", records.display());
    }
    let labels = match risk {
        Some(path) => read_risk(files::open(path)?, delimiter).map_err(|e| CliError::io(path, e))?,
        None => RiskLabels::new(),
    };

    let built = build_bipartite(&parsed.records, &window, &labels, build);
    for s in &built.skipped {
        warn!("record {} skipped: {}", s.index + 1, s.reason);
    }
    if built.unmatched_risk > 0 {
        warn!("{} risk entries name no company in the graph", built.unmatched_risk);
    }
    let projection = project_unipartite(&built.graph);

    files::ensure_dir(out)?;
    let path = join(out, files::BIPARTITE);
    write_bipartite(files::create(&path)?, &built.graph).map_err(|e| CliError::io(&path, e))?;
    let path = join(out, files::PROJECTION);
    write_unipartite(files::create(&path)?, &projection).map_err(|e| CliError::io(&path, e))?;
    let path = join(out, files::COMPANY_RISK);
    write_company_risk(files::create(&path)?, built.graph.companies(), &built.risk).map_err(|e| CliError::io(&path, e))?;
    let path = join(out, files::SURROGATES);
    write_surrogates(files::create(&path)?, &built.surrogates).map_err(|e| CliError::io(&path, e))?;

    let (compliant, risky) = built.risk.counts();
    let bipartite = built.graph.stats();
    let projected = projection.stats();
    let summary = BuildSummary {
        records: parsed.records.len(),
        parse_warnings: parsed.warnings.len(),
        skipped_records: built.skipped.len(),
        risk_entries: labels.len(),
        unmatched_risk: built.unmatched_risk,
        labeled_companies: compliant + risky,
        risk_companies: risky,
        surrogates: built.surrogates.len(),
        edge_ratio: (bipartite.edges > 0).then(|| projected.edges as f64 / bipartite.edges as f64),
        bipartite,
        projection: projected,
    };
    files::write_json(&join(out, files::GRAPH_STATS), &summary)?;
    Ok(summary)
}

pub fn read_graphs(dir: &Path) -> Result<Graphs, CliError> {
    let path = join(dir, files::BIPARTITE);
    let bipartite = read_bipartite(files::open(&path)?).map_err(|e| CliError::io(&path, e))?;
    let path = join(dir, files::PROJECTION);
    let projection =
        read_unipartite(files::open(&path)?, bipartite.companies().to_vec()).map_err(|e| CliError::io(&path, e))?;
    let path = join(dir, files::COMPANY_RISK);
    let risk = read_company_risk(files::open(&path)?, bipartite.companies()).map_err(|e| CliError::io(&path, e))?;
    Ok(Graphs { bipartite, projection, risk })
}
