//! k-fold label masking: every labeled company is scored in the run where
//! its own fold's labels are hidden.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteGraph, NodeKind, RiskLabel, RiskVector, UnipartiteGraph};
use crate::ranking::{
    birank, pagerank, row_normalize, symmetric_normalize, BiRankParams, NormalizedMatrix, PageRankParams, RankError,
    RestartVector,
};

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Error)]
pub enum CvError {
    #[error("need at least 2 folds, got {0}")]
    TooFewFolds(usize),
    #[error("{label} stratum has {count} labeled companies, fewer than k = {k}")]
    StratumTooSmall { label: &'static str, count: usize, k: usize },
    #[error("company `{0}` is not in the company list")]
    UnknownCompany(String),
    #[error("fold assignment covers {got} companies, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("partition {partition}, fold {fold}: {source}")]
    Rank {
        partition: usize,
        fold: usize,
        #[source]
        source: RankError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Fold of every labeled company; unknown companies have none.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<Option<usize>>,
}

impl FoldAssignment {
    pub fn fold_of(&self, company: usize) -> Option<usize> {
        self.folds[company]
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for f in self.folds.iter().flatten() {
            sizes[*f] += 1;
        }
        sizes
    }
}

/// Stratified assignment: each label stratum is shuffled with a seeded
/// ChaCha8 stream and dealt round-robin. The dealing position carries over
/// from one stratum to the next so total fold sizes also differ by at most
/// one. An empty stratum is allowed; a non-empty one needs at least `k`
/// members.
pub fn assign_folds(risk: &RiskVector, k: usize, seed: u64) -> Result<FoldAssignment, CvError> {
    if k < 2 {
        return Err(CvError::TooFewFolds(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![None; risk.len()];
    let mut next = 0usize;
    for (label, name) in [(RiskLabel::Compliant, "compliant"), (RiskLabel::Risk, "risk")] {
        let mut stratum: Vec<usize> = (0..risk.len()).filter(|&i| risk.get(i) == label).collect();
        if stratum.is_empty() {
            continue;
        }
        if stratum.len() < k {
            return Err(CvError::StratumTooSmall { label: name, count: stratum.len(), k });
        }
        stratum.shuffle(&mut rng);
        for node in stratum {
            folds[node] = Some(next % k);
            next += 1;
        }
    }
    Ok(FoldAssignment { k, seed, folds })
}

pub fn write_folds<W: Write>(w: W, companies: &[String], folds: &FoldAssignment) -> Result<(), CvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["company_id", "fold_id"])?;
    for (c, f) in companies.iter().zip(&folds.folds) {
        if let Some(f) = f {
            wtr.write_record([c.as_str(), &f.to_string()])?;
        }
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum Algorithm {
    PageRank(PageRankParams),
    BiRank(BiRankParams),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::PageRank(_) => "pagerank",
            Algorithm::BiRank(_) => "birank",
        }
    }
}

/// Per-partition input graphs. PageRank runs on projections, BiRank on
/// bipartite restrictions.
#[derive(Debug, Clone, Copy)]
pub enum PartitionGraphs<'a> {
    Unipartite(&'a [UnipartiteGraph]),
    Bipartite(&'a [BipartiteGraph]),
}

impl PartitionGraphs<'_> {
    fn len(&self) -> usize {
        match self {
            PartitionGraphs::Unipartite(g) => g.len(),
            PartitionGraphs::Bipartite(g) => g.len(),
        }
    }

    fn companies(&self, p: usize) -> &[String] {
        match self {
            PartitionGraphs::Unipartite(g) => g[p].nodes(),
            PartitionGraphs::Bipartite(g) => g[p].companies(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeScore {
    pub node_id: String,
    pub node_kind: NodeKind,
    pub score: f64,
    pub partition_id: usize,
    /// Run the score was taken from.
    pub fold_id: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CvScores {
    /// One row per retained company, ordered by company id.
    pub companies: Vec<NodeScore>,
    /// BiRank only: person scores from run 0, one row per (person, partition).
    pub persons: Vec<NodeScore>,
    pub runs: usize,
    pub non_converged_runs: usize,
}

impl CvScores {
    pub fn all_converged(&self) -> bool {
        self.non_converged_runs == 0
    }
}

enum Prepared {
    Uni(NormalizedMatrix),
    Bi(NormalizedMatrix, usize),
}

struct RunOutput {
    partition: usize,
    fold: usize,
    company_scores: Vec<f64>,
    person_scores: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Runs `algorithm` once per (partition, fold) with that fold's labels
/// masked and merges: labeled companies take the score of their own fold's
/// run, unknown companies and persons that of run 0. Runs that cannot
/// contribute anything are skipped. `companies` is the global company list
/// `risk` and `folds` are indexed by. Parallel over all runs; the merge is
/// sequential and keyed by ids, so output does not depend on scheduling.
pub fn cv_rank(
    companies: &[String],
    graphs: PartitionGraphs<'_>,
    risk: &RiskVector,
    folds: &FoldAssignment,
    algorithm: &Algorithm,
) -> Result<CvScores, CvError> {
    if risk.len() != companies.len() || folds.folds.len() != companies.len() {
        return Err(CvError::Dimension {
            expected: companies.len(),
            got: if risk.len() != companies.len() { risk.len() } else { folds.folds.len() },
        });
    }
    if folds.k < 2 {
        return Err(CvError::TooFewFolds(folds.k));
    }
    let global = |id: &String| {
        companies
            .binary_search(id)
            .map_err(|_| CvError::UnknownCompany(id.clone()))
    };
    let local_to_global: Vec<Vec<usize>> = (0..graphs.len())
        .map(|p| graphs.companies(p).iter().map(global).collect())
        .collect::<Result<_, _>>()?;

    let prepared: Vec<Prepared> = (0..graphs.len())
        .into_par_iter()
        .map(|p| match graphs {
            PartitionGraphs::Unipartite(g) => Prepared::Uni(row_normalize(&g[p])),
            PartitionGraphs::Bipartite(g) => Prepared::Bi(symmetric_normalize(&g[p]), g[p].person_count()),
        })
        .collect();

    let mut tasks = Vec::new();
    for (p, members) in local_to_global.iter().enumerate() {
        let needs_run_zero = match graphs {
            PartitionGraphs::Bipartite(g) => g[p].person_count() > 0,
            PartitionGraphs::Unipartite(_) => false,
        } || members.iter().any(|&c| matches!(folds.fold_of(c), None | Some(0)));
        for f in 0..folds.k {
            let needed = if f == 0 {
                needs_run_zero
            } else {
                members.iter().any(|&c| folds.fold_of(c) == Some(f))
            };
            if needed {
                tasks.push((p, f));
            }
        }
    }

    let outputs: Vec<RunOutput> = tasks
        .par_iter()
        .map(|&(p, f)| {
            let members = &local_to_global[p];
            let local_risk = RiskVector::from_labels(members.iter().map(|&c| risk.get(c)).collect());
            let restart = RestartVector::from_risk(&local_risk, |i| folds.fold_of(members[i]) == Some(f));
            let wrap = |source| CvError::Rank { partition: p, fold: f, source };
            match (&prepared[p], algorithm) {
                (Prepared::Uni(a), Algorithm::PageRank(params)) => {
                    let r = pagerank(a, &restart, params).map_err(wrap)?;
                    Ok(RunOutput {
                        partition: p,
                        fold: f,
                        company_scores: r.scores,
                        person_scores: Vec::new(),
                        iterations: r.iterations,
                        converged: r.converged,
                    })
                }
                (Prepared::Bi(s, n_persons), Algorithm::BiRank(params)) => {
                    let (u, v) = birank(s, &restart, &RestartVector::zeros(*n_persons), params).map_err(wrap)?;
                    Ok(RunOutput {
                        partition: p,
                        fold: f,
                        company_scores: u.scores,
                        person_scores: v.scores,
                        iterations: u.iterations,
                        converged: u.converged,
                    })
                }
                _ => Err(wrap(RankError::InvalidParams(format!(
                    "{} cannot run on these partition graphs",
                    algorithm.name()
                )))),
            }
        })
        .collect::<Result<_, _>>()?;

    let mut out = CvScores {
        runs: outputs.len(),
        non_converged_runs: outputs.iter().filter(|o| !o.converged).count(),
        ..Default::default()
    };
    for o in &outputs {
        let members = &local_to_global[o.partition];
        for (i, &c) in members.iter().enumerate() {
            if folds.fold_of(c).unwrap_or(0) == o.fold {
                out.companies.push(NodeScore {
                    node_id: companies[c].clone(),
                    node_kind: NodeKind::Company,
                    score: o.company_scores[i],
                    partition_id: o.partition,
                    fold_id: o.fold,
                    iterations: o.iterations,
                    converged: o.converged,
                });
            }
        }
        if o.fold == 0 {
            if let PartitionGraphs::Bipartite(g) = graphs {
                for (j, person) in g[o.partition].persons().iter().enumerate() {
                    out.persons.push(NodeScore {
                        node_id: person.clone(),
                        node_kind: NodeKind::Person,
                        score: o.person_scores[j],
                        partition_id: o.partition,
                        fold_id: 0,
                        iterations: o.iterations,
                        converged: o.converged,
                    });
                }
            }
        }
    }
    out.companies.sort_by(|a, b| a.node_id.cmp(&b.node_id));
    out.persons
        .sort_by(|a, b| a.node_id.cmp(&b.node_id).then(a.partition_id.cmp(&b.partition_id)));
    Ok(out)
}

/// Score file: `node_id,node_kind,score,partition_id,fold_id,iterations,converged`,
/// companies first.
pub fn write_scores<W: Write>(w: W, scores: &CvScores) -> Result<(), CvError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["node_id", "node_kind", "score", "partition_id", "fold_id", "iterations", "converged"])?;
    for s in scores.companies.iter().chain(&scores.persons) {
        wtr.write_record([
            s.node_id.as_str(),
            s.node_kind.as_str(),
            &format!("{:e}", s.score),
            &s.partition_id.to_string(),
            &s.fold_id.to_string(),
            &s.iterations.to_string(),
            if s.converged { "1" } else { "0" },
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
