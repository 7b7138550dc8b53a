use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use log::{error, info, warn};
use serde::Serialize;

use riskrank::crossval::{assign_folds, cv_rank, write_folds, write_scores, Algorithm, CvScores, FoldAssignment, PartitionGraphs};
use riskrank::eval::{evaluate, midranks, precision_recall_at, selection_size, target_chart, LabeledScore, MetricReport};
use riskrank::graph::{BipartiteGraph, UnipartiteGraph};
use riskrank::partition::{restrict_bipartite, PartitionSet};

use crate::commands::build::{read_graphs, Graphs};
use crate::commands::partition::read_partitions;
use crate::config::RunConfig;
use crate::error::{CliError, Outcome, EXIT_OK};
use crate::files::{self, join};

/// Share of labeled companies selected for the headline precision/recall.
pub const HEADLINE_SELECTION: f64 = 0.2;
/// The headline lift is that of the first of this many target-chart bins.
pub const HEADLINE_BINS: usize = 20;

/// Graphs, partitions and folds shared by `rank` and `bench`.
pub struct RankInputs {
    pub graphs: Graphs,
    pub set: PartitionSet,
    pub folds: FoldAssignment,
    pub unipartite: Vec<UnipartiteGraph>,
    pub bipartite: Vec<BipartiteGraph>,
}

impl RankInputs {
    pub fn load(cfg: &RunConfig, graphs: &Path, partitions: &Path) -> Result<Self, CliError> {
        cfg.validate()?;
        let g = read_graphs(graphs)?;
        let set = read_partitions(partitions)?;
        let folds = assign_folds(&g.risk, cfg.cv.folds, cfg.seed).map_err(CliError::input)?;
        let unipartite = if cfg.algorithm.pagerank() {
            set.restrict_unipartite(&g.projection).map_err(CliError::input)?
        } else {
            Vec::new()
        };
        let bipartite = if cfg.algorithm.birank() {
            restrict_bipartite(&g.bipartite, &set).map_err(CliError::input)?
        } else {
            Vec::new()
        };
        Ok(RankInputs { graphs: g, set, folds, unipartite, bipartite })
    }

    /// Selected algorithms with their parameters, PageRank first.
    pub fn algorithms(cfg: &RunConfig) -> Vec<Algorithm> {
        let mut out = Vec::new();
        if cfg.algorithm.pagerank() {
            out.push(Algorithm::PageRank(cfg.pagerank));
        }
        if cfg.algorithm.birank() {
            out.push(Algorithm::BiRank(cfg.birank));
        }
        out
    }

    pub fn run(&self, algorithm: &Algorithm) -> Result<CvScores, CliError> {
        let graphs = match algorithm {
            Algorithm::PageRank(_) => PartitionGraphs::Unipartite(&self.unipartite),
            Algorithm::BiRank(_) => PartitionGraphs::Bipartite(&self.bipartite),
        };
        Ok(cv_rank(self.graphs.bipartite.companies(), graphs, &self.graphs.risk, &self.folds, algorithm)?)
    }

    /// Cross-validated scores of labeled companies.
    pub fn labeled(&self, scores: &CvScores) -> Vec<LabeledScore> {
        let companies = self.graphs.bipartite.companies();
        scores
            .companies
            .iter()
            .filter_map(|s| {
                let i = companies.binary_search(&s.node_id).ok()?;
                let label = self.graphs.risk.get(i).as_flag()?;
                Some(LabeledScore::new(s.node_id.clone(), s.score, label))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Headline {
    pub rho: Option<f64>,
    pub rho_p: Option<f64>,
    pub z: f64,
    pub z_p: f64,
    pub selection_fraction: f64,
    pub n_selected: usize,
    pub precision_at_selection: f64,
    pub recall_at_selection: f64,
    pub top_bin_fraction: f64,
    pub top_bin_lift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub algorithm: String,
    pub params: Algorithm,
    pub folds: usize,
    pub seed: u64,
    pub partitions: usize,
    pub runs: usize,
    pub non_converged_runs: usize,
    pub scored_companies: usize,
    pub scored_persons: usize,
    pub headline: Headline,
    pub metrics: MetricReport,
}

#[derive(Debug, Default)]
pub struct RankRun {
    pub reports: Vec<RankReport>,
    /// Algorithms that produced no report, with the reason.
    pub failures: Vec<(String, CliError)>,
    pub outcome: Outcome,
}

impl RankRun {
    /// Worst failure code, else 3 for partial results, else 0.
    pub fn exit_code(&self) -> i32 {
        self.failures
            .iter()
            .map(|(_, e)| e.exit_code())
            .max()
            .unwrap_or(EXIT_OK)
            .max(self.outcome.exit_code())
    }

    pub fn report(&self, algorithm: &str) -> Option<&RankReport> {
        self.reports.iter().find(|r| r.algorithm == algorithm)
    }
}

/// Cross-validated ranking and evaluation. Each selected algorithm writes its
/// own files; a failure of one does not stop the other.
pub fn cmd_rank(cfg: &RunConfig, graphs: &Path, partitions: &Path, out: &Path) -> Result<RankRun, CliError> {
    let inputs = RankInputs::load(cfg, graphs, partitions)?;
    files::ensure_dir(out)?;
    let path = join(out, files::FOLDS);
    write_folds(files::create(&path)?, inputs.graphs.bipartite.companies(), &inputs.folds)
        .map_err(|e| CliError::io(&path, e))?;

    let mut run = RankRun::default();
    let mut timing = BTreeMap::new();
    for algorithm in RankInputs::algorithms(cfg) {
        let name = algorithm.name();
        let started = Instant::now();
        let result = rank_one(cfg, &inputs, &algorithm, out);
        timing.insert(name, started.elapsed().as_secs_f64());
        match result {
            Ok(report) => {
                if report.non_converged_runs > 0 {
                    let msg = format!("{name}: {} of {} runs did not converge", report.non_converged_runs, report.runs);
                    warn!("{msg}");
                    run.outcome.partial.push(msg);
                }
                info!("{name}: rho {:?}, z {:.3}", report.headline.rho, report.headline.z);
                run.reports.push(report);
            }
            Err(e) => {
                error!("{name}: {e}");
                run.failures.push((name.to_string(), e));
            }
        }
    }
    files::write_json(&join(out, files::RANK_TIMING), &timing)?;
    Ok(run)
}

fn rank_one(cfg: &RunConfig, inputs: &RankInputs, algorithm: &Algorithm, out: &Path) -> Result<RankReport, CliError> {
    let name = algorithm.name();
    let scores = inputs.run(algorithm)?;
    let path = join(out, &files::scores(name));
    write_scores(files::create(&path)?, &scores).map_err(|e| CliError::io(&path, e))?;

    let data = inputs.labeled(&scores);
    let metrics = evaluate(name, &data, scores.companies.len(), &cfg.eval).map_err(|e| CliError::input(format!("{name}: {e}")))?;
    let n_selected = selection_size(data.len(), HEADLINE_SELECTION);
    let at = precision_recall_at(&data, n_selected).map_err(CliError::input)?;
    let top_bin_lift = if data.len() >= HEADLINE_BINS {
        target_chart(&data, HEADLINE_BINS).map_err(CliError::input)?[0].lift
    } else {
        None
    };
    let headline = Headline {
        rho: metrics.rho,
        rho_p: metrics.rho_p,
        z: metrics.z,
        z_p: metrics.z_p,
        selection_fraction: HEADLINE_SELECTION,
        n_selected,
        precision_at_selection: at.precision,
        recall_at_selection: at.recall,
        top_bin_fraction: 1.0 / HEADLINE_BINS as f64,
        top_bin_lift,
    };

    files::write_table(
        &join(out, &files::pr_curve(name)),
        &["n_selected", "precision", "recall"],
        metrics
            .pr_curve
            .iter()
            .map(|p| [p.n_selected.to_string(), p.precision.to_string(), p.recall.to_string()]),
    )?;
    files::write_table(
        &join(out, &files::target_chart(name)),
        &["bin", "size", "positives", "positive_rate", "lift"],
        metrics.target_bins.iter().map(|b| {
            [
                b.bin.to_string(),
                b.size.to_string(),
                b.positives.to_string(),
                b.positive_rate.to_string(),
                b.lift.map(|l| l.to_string()).unwrap_or_default(),
            ]
        }),
    )?;
    let ranks = midranks(&data.iter().map(|d| d.score).collect::<Vec<_>>());
    files::write_table(
        &join(out, &files::midranks(name)),
        &["company_id", "label", "score", "midrank"],
        data.iter().zip(&ranks).map(|(d, r)| {
            [
                d.company_id.clone(),
                (d.label as u8).to_string(),
                format!("{:e}", d.score),
                r.to_string(),
            ]
        }),
    )?;

    let report = RankReport {
        algorithm: name.to_string(),
        params: *algorithm,
        folds: inputs.folds.k,
        seed: inputs.folds.seed,
        partitions: inputs.set.len(),
        runs: scores.runs,
        non_converged_runs: scores.non_converged_runs,
        scored_companies: scores.companies.len(),
        scored_persons: scores.persons.len(),
        headline,
        metrics,
    };
    files::write_json(&join(out, &files::metrics(name)), &report)?;
    Ok(report)
}
