use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use riskrank::datagen::{generate, GenConfig};
use riskrank::graph::{build_bipartite, project_unipartite};

use crate::commands::build::cmd_build;
use crate::commands::generate::cmd_generate;
use crate::commands::partition::cmd_partition;
use crate::commands::rank::{cmd_rank, Headline, RankRun};
use crate::config::{RunConfig, REPRODUCE_MAX_SIZE, REPRODUCE_MIN_SIZE};
use crate::error::CliError;
use crate::files::{self, join};

pub const DATA_DIR: &str = "data";
pub const GRAPHS_DIR: &str = "graphs";
pub const PARTITIONS_DIR: &str = "partitions";
pub const RANK_DIR: &str = "rank";

pub const HUB_RATIO_MIN: f64 = 3.0;
pub const HUB_FREE_RATIO_MAX: f64 = 1.2;
pub const RHO_P_MAX: f64 = 0.01;
pub const BIRANK_LIFT_MIN: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeCounts {
    pub bipartite_edges: usize,
    pub projected_edges: usize,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub name: String,
    pub statement: String,
    pub observed: Option<f64>,
    pub threshold: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionCounts {
    pub partitions: usize,
    pub retained_companies: usize,
    pub dropped_companies: usize,
    pub largest: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproduceReport {
    pub generator: GenConfig,
    pub graph: EdgeCounts,
    pub hub_free_graph: EdgeCounts,
    pub partitions: PartitionCounts,
    pub headlines: BTreeMap<String, Headline>,
    pub failures: Vec<String>,
    pub claims: Vec<Claim>,
}

pub struct Reproduction {
    pub report: ReproduceReport,
    pub rank: RankRun,
}

impl Reproduction {
    pub fn exit_code(&self) -> i32 {
        self.rank.exit_code()
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.report.claims.iter().find(|c| c.name == name)
    }
}

fn counts(bipartite_edges: usize, projected_edges: usize) -> EdgeCounts {
    EdgeCounts {
        bipartite_edges,
        projected_edges,
        ratio: (bipartite_edges > 0).then(|| projected_edges as f64 / bipartite_edges as f64),
    }
}

fn claim(name: &str, statement: &str, observed: Option<f64>, threshold: Option<f64>, pass: bool) -> Claim {
    Claim {
        name: name.to_string(),
        statement: statement.to_string(),
        observed,
        threshold,
        pass,
    }
}

/// generate → build → partition → rank into subdirectories of `out`, the same
/// files the four commands write on their own, plus `report.json`.
pub fn cmd_reproduce(cfg: &RunConfig, out: &Path) -> Result<Reproduction, CliError> {
    cfg.validate()?;
    let mut timing = BTreeMap::new();
    let mut stage = |name: &'static str, started: Instant| {
        timing.insert(name, started.elapsed().as_secs_f64());
    };

    let (data, graphs, parts, rank) = (join(out, DATA_DIR), join(out, GRAPHS_DIR), join(out, PARTITIONS_DIR), join(out, RANK_DIR));
    let t = Instant::now();
    cmd_generate(&cfg.generate, &data)?;
    stage("generate", t);
    let t = Instant::now();
    let built = cmd_build(cfg, &join(&data, files::RECORDS), Some(&join(&data, files::RISK)), &graphs)?;
    stage("build", t);
    let t = Instant::now();
    let (summary, partition_outcome) = cmd_partition(cfg, &graphs, &parts, REPRODUCE_MAX_SIZE, REPRODUCE_MIN_SIZE)?;
    stage("partition", t);
    let t = Instant::now();
    let mut rank_run = cmd_rank(cfg, &graphs, &join(&parts, files::PARTITIONS), &rank)?;
    rank_run.outcome.merge(partition_outcome);
    stage("rank", t);

    let t = Instant::now();
    let hub_free = hub_free_counts(cfg)?;
    stage("hub_free", t);

    let graph = counts(built.bipartite.edges, built.projection.edges);
    let headlines: BTreeMap<String, Headline> =
        rank_run.reports.iter().map(|r| (r.algorithm.clone(), r.headline.clone())).collect();
    let report = ReproduceReport {
        generator: cfg.generate.clone(),
        claims: claims(&graph, &hub_free, &headlines),
        graph,
        hub_free_graph: hub_free,
        partitions: PartitionCounts {
            partitions: summary.partition_count,
            retained_companies: summary.retained_nodes,
            dropped_companies: summary.dropped_nodes,
            largest: summary.max_size,
        },
        headlines,
        failures: rank_run.failures.iter().map(|(a, e)| format!("{a}: {e}")).collect(),
    };
    files::write_json(&join(out, files::REPORT), &report)?;
    files::write_json(&join(out, files::REPRODUCE_TIMING), &timing)?;
    Ok(Reproduction { report, rank: rank_run })
}

/// Edge counts of the same generator without hub directors.
fn hub_free_counts(cfg: &RunConfig) -> Result<EdgeCounts, CliError> {
    let gen = GenConfig { hub_count: 0, ..cfg.generate.clone() };
    let data = generate(&gen).map_err(CliError::input)?;
    let built = build_bipartite(&data.records, &cfg.window()?, &data.risk, cfg.build_config()?);
    let projected = project_unipartite(&built.graph);
    Ok(counts(built.graph.edges().len(), projected.edges().len()))
}

fn claims(graph: &EdgeCounts, hub_free: &EdgeCounts, headlines: &BTreeMap<String, Headline>) -> Vec<Claim> {
    let mut out = vec![
        claim(
            "projection_inflates_with_hubs",
            "projected edges exceed bipartite edges by more than the threshold factor",
            graph.ratio,
            Some(HUB_RATIO_MIN),
            graph.ratio.is_some_and(|r| r > HUB_RATIO_MIN),
        ),
        claim(
            "projection_small_without_hubs",
            "without hub directors the projection stays below the threshold factor",
            hub_free.ratio,
            Some(HUB_FREE_RATIO_MAX),
            hub_free.ratio.is_some_and(|r| r < HUB_FREE_RATIO_MAX),
        ),
    ];
    for algorithm in ["pagerank", "birank"] {
        let h = headlines.get(algorithm);
        let rho = h.and_then(|h| h.rho);
        let p = h.and_then(|h| h.rho_p);
        out.push(claim(
            &format!("{algorithm}_spearman_positive"),
            "cross-validated score correlates positively with risk, p below threshold",
            rho,
            Some(RHO_P_MAX),
            matches!((rho, p), (Some(r), Some(p)) if r > 0.0 && p < RHO_P_MAX),
        ));
        let z = h.map(|h| h.z);
        out.push(claim(
            &format!("{algorithm}_mann_whitney_positive"),
            "risky companies score higher than compliant ones (Z > 0)",
            z,
            Some(0.0),
            z.is_some_and(|z| z > 0.0),
        ));
    }
    let lift = headlines.get("birank").and_then(|h| h.top_bin_lift);
    out.push(claim(
        "birank_top_bin_lift",
        "top 5% of BiRank scores hold more than threshold times the overall risk rate",
        lift,
        Some(BIRANK_LIFT_MIN),
        lift.is_some_and(|l| l > BIRANK_LIFT_MIN),
    ));
    let recall = |a: &str| headlines.get(a).map(|h| h.recall_at_selection);
    let (bi, pr) = (recall("birank"), recall("pagerank"));
    out.push(claim(
        "birank_recall_at_least_pagerank",
        "at a 20% selection BiRank recall is at least PageRank recall",
        bi,
        pr,
        matches!((bi, pr), (Some(b), Some(p)) if b >= p),
    ));
    out
}
