//! Connected components, recursive spectral bisection and the mapping of a
//! company partition back onto the bipartite graph.

mod components;
mod fiedler;
pub mod io;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteEdge, BipartiteGraph, GraphError, UnipartiteGraph};

pub use components::{connected_components, Components, DisjointSets};
pub use fiedler::{fiedler_of_laplacian, fiedler_vector, FiedlerError, FiedlerOptions, FiedlerResult, Laplacian};

use components::components_within;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BisectionError {
    #[error(transparent)]
    Fiedler(#[from] FiedlerError),
    #[error("degenerate bisection: all {0} nodes fell on one side")]
    Degenerate(usize),
}

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("invalid partition config: {0}")]
    InvalidConfig(String),
    #[error("company `{0}` in partition is not in the bipartite graph")]
    Integrity(String),
    #[error("company `{0}` assigned to more than one partition")]
    Overlap(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Node indices on each side of a sign split, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bisection {
    pub negative: Vec<usize>,
    pub non_negative: Vec<usize>,
}

/// Entries with `|v_i| < tol` count as zero and go to the non-negative side.
pub fn split_by_sign(vector: &[f64], tol: f64) -> Result<Bisection, BisectionError> {
    let (negative, non_negative): (Vec<usize>, Vec<usize>) =
        (0..vector.len()).partition(|&i| vector[i] <= -tol);
    if negative.is_empty() || non_negative.is_empty() {
        return Err(BisectionError::Degenerate(vector.len()));
    }
    Ok(Bisection { negative, non_negative })
}

pub fn spectral_bisection(g: &UnipartiteGraph, opts: &FiedlerOptions) -> Result<Bisection, BisectionError> {
    let f = fiedler_vector(g, opts)?;
    split_by_sign(&f.vector, opts.tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    /// Pieces with at least this many companies are bisected.
    pub max_size: usize,
    /// Final pieces smaller than this are dropped.
    pub min_size: usize,
    pub fiedler: FiedlerOptions,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            max_size: 50_000,
            min_size: 50,
            fiedler: FiedlerOptions::default(),
        }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<(), PartitionError> {
        if self.min_size == 0 {
            return Err(PartitionError::InvalidConfig("min_size must be at least 1".into()));
        }
        if self.max_size < 3 {
            return Err(PartitionError::InvalidConfig("max_size must be at least 3".into()));
        }
        if self.max_size <= self.min_size {
            return Err(PartitionError::InvalidConfig(format!(
                "max_size ({}) must exceed min_size ({})",
                self.max_size, self.min_size
            )));
        }
        if !(self.fiedler.tol > 0.0) || self.fiedler.max_iter == 0 {
            return Err(PartitionError::InvalidConfig("fiedler tol must be > 0 and max_iter >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStep {
    Negative,
    NonNegative,
    /// The side of a split fell apart; index of the piece within that side.
    Piece(usize),
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathStep::Negative => write!(f, "-"),
            PathStep::NonNegative => write!(f, "+"),
            PathStep::Piece(i) => write!(f, "c{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Connected component of the input graph this partition came from.
    pub root_component: usize,
    pub path: Vec<PathStep>,
    /// Set when a bisection failed and the piece was kept whole.
    pub unsplit: Option<String>,
}

impl Provenance {
    pub fn path_string(&self) -> String {
        self.path.iter().map(ToString::to_string).collect::<Vec<_>>().join("/")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    /// Company ids, ascending.
    pub companies: Vec<String>,
    /// Absent when the partition was read back from an assignment file.
    pub provenance: Option<Provenance>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.companies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.companies.is_empty()
    }
}

/// Retained partitions in canonical order (by smallest company id) plus the
/// companies that ended up in dropped pieces.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PartitionSet {
    pub partitions: Vec<Partition>,
    pub dropped: Vec<String>,
}

impl PartitionSet {
    /// Sorts companies within partitions, partitions by first company, and
    /// checks disjointness.
    pub fn new(mut partitions: Vec<Partition>, mut dropped: Vec<String>) -> Result<Self, PartitionError> {
        for p in &mut partitions {
            p.companies.sort();
        }
        partitions.retain(|p| !p.is_empty());
        partitions.sort_by(|a, b| a.companies[0].cmp(&b.companies[0]));
        dropped.sort();
        let mut all: Vec<&String> = partitions.iter().flat_map(|p| &p.companies).chain(&dropped).collect();
        all.sort();
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(PartitionError::Overlap(w[0].clone()));
        }
        Ok(PartitionSet { partitions, dropped })
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn retained_count(&self) -> usize {
        self.partitions.iter().map(Partition::len).sum()
    }

    /// Partitions whose bisection failed.
    pub fn warnings(&self) -> impl Iterator<Item = (usize, &str)> {
        self.partitions.iter().enumerate().filter_map(|(i, p)| {
            p.provenance
                .as_ref()
                .and_then(|pr| pr.unsplit.as_deref())
                .map(|w| (i, w))
        })
    }

    /// Induced company–company subgraph of every partition.
    pub fn restrict_unipartite(&self, g: &UnipartiteGraph) -> Result<Vec<UnipartiteGraph>, PartitionError> {
        self.partitions
            .iter()
            .map(|p| {
                let members = p
                    .companies
                    .iter()
                    .map(|c| g.node_index(c).ok_or_else(|| PartitionError::Integrity(c.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(g.induced(&members))
            })
            .collect()
    }

    pub fn summary(&self) -> PartitionSummary {
        PartitionSummary::of(self)
    }
}

struct Piece {
    members: Vec<usize>,
    provenance: Provenance,
}

fn split_recursive(adj: &[Vec<(usize, f64)>], piece: Piece, config: &PartitionConfig) -> Vec<Piece> {
    if piece.members.len() < config.max_size {
        return vec![piece];
    }
    let lap = Laplacian::induced(adj, &piece.members);
    let bisection = fiedler_of_laplacian(&lap, &config.fiedler)
        .map_err(BisectionError::from)
        .and_then(|f| split_by_sign(&f.vector, config.fiedler.tol));
    let bisection = match bisection {
        Ok(b) => b,
        Err(e) => {
            let mut piece = piece;
            piece.provenance.unsplit = Some(e.to_string());
            return vec![piece];
        }
    };

    let mut children = Vec::new();
    for (step, side) in [
        (PathStep::Negative, bisection.negative),
        (PathStep::NonNegative, bisection.non_negative),
    ] {
        let global: Vec<usize> = side.iter().map(|&i| piece.members[i]).collect();
        let pieces = components_within(adj, &global);
        let split_up = pieces.len() > 1;
        for (k, members) in pieces.into_iter().enumerate() {
            let mut provenance = piece.provenance.clone();
            provenance.path.push(step);
            if split_up {
                provenance.path.push(PathStep::Piece(k));
            }
            children.push(Piece { members, provenance });
        }
    }
    children
        .into_par_iter()
        .flat_map_iter(|child| split_recursive(adj, child, config))
        .collect()
}

/// Splits `g` into connected components, bisects every piece with at least
/// `max_size` companies along the sign of its Fiedler vector (re-splitting
/// sides that fall apart into their components), and finally drops pieces
/// smaller than `min_size`.
pub fn recursive_partition(g: &UnipartiteGraph, config: &PartitionConfig) -> Result<PartitionSet, PartitionError> {
    config.validate()?;
    let adj = g.adjacency();
    let roots: Vec<Piece> = connected_components(g)
        .groups()
        .into_iter()
        .enumerate()
        .map(|(root_component, members)| Piece {
            members,
            provenance: Provenance {
                root_component,
                path: Vec::new(),
                unsplit: None,
            },
        })
        .collect();
    let pieces: Vec<Piece> = roots
        .into_par_iter()
        .flat_map_iter(|p| split_recursive(&adj, p, config))
        .collect();

    let mut partitions = Vec::new();
    let mut dropped = Vec::new();
    for piece in pieces {
        let ids = piece.members.iter().map(|&i| g.nodes()[i].clone());
        if piece.members.len() < config.min_size {
            dropped.extend(ids);
        } else {
            partitions.push(Partition {
                companies: ids.collect(),
                provenance: Some(piece.provenance),
            });
        }
    }
    PartitionSet::new(partitions, dropped)
}

/// One bipartite graph per partition: its companies, every person with an
/// edge into it, and exactly those edges. Persons reaching several partitions
/// appear in each of them.
pub fn restrict_bipartite(b: &BipartiteGraph, set: &PartitionSet) -> Result<Vec<BipartiteGraph>, PartitionError> {
    let mut owner = vec![usize::MAX; b.company_count()];
    for (pid, p) in set.partitions.iter().enumerate() {
        for c in &p.companies {
            let idx = b.company_index(c).ok_or_else(|| PartitionError::Integrity(c.clone()))?;
            owner[idx] = pid;
        }
    }
    let mut edges_of: Vec<Vec<&BipartiteEdge>> = vec![Vec::new(); set.len()];
    for e in b.edges() {
        if owner[e.company] != usize::MAX {
            edges_of[owner[e.company]].push(e);
        }
    }
    set.partitions
        .iter()
        .zip(edges_of)
        .map(|(p, edges)| {
            let mut persons: Vec<usize> = edges.iter().map(|e| e.person).collect();
            persons.sort_unstable();
            persons.dedup();
            let local_edges = edges
                .iter()
                .map(|e| BipartiteEdge {
                    company: p.companies.binary_search(&b.companies()[e.company]).unwrap(),
                    person: persons.binary_search(&e.person).unwrap(),
                    weight: e.weight,
                })
                .collect();
            let person_ids = persons.iter().map(|&i| b.persons()[i].clone()).collect();
            Ok(BipartiteGraph::new(p.companies.clone(), person_ids, local_edges)?)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionEntry {
    pub partition_id: usize,
    pub size: usize,
    pub root_component: Option<usize>,
    pub path: Option<String>,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub partition_count: usize,
    pub retained_nodes: usize,
    pub dropped_nodes: usize,
    pub min_size: Option<usize>,
    pub max_size: Option<usize>,
    pub mean_size: Option<f64>,
    pub median_size: Option<f64>,
    pub unsplit_warnings: usize,
    pub partitions: Vec<PartitionEntry>,
}

impl PartitionSummary {
    pub fn of(set: &PartitionSet) -> Self {
        let mut sizes: Vec<usize> = set.partitions.iter().map(Partition::len).collect();
        sizes.sort_unstable();
        let n = sizes.len();
        let median = match n {
            0 => None,
            _ if n % 2 == 1 => Some(sizes[n / 2] as f64),
            _ => Some((sizes[n / 2 - 1] + sizes[n / 2]) as f64 / 2.0),
        };
        PartitionSummary {
            partition_count: n,
            retained_nodes: set.retained_count(),
            dropped_nodes: set.dropped.len(),
            min_size: sizes.first().copied(),
            max_size: sizes.last().copied(),
            mean_size: (n > 0).then(|| sizes.iter().sum::<usize>() as f64 / n as f64),
            median_size: median,
            unsplit_warnings: set.warnings().count(),
            partitions: set
                .partitions
                .iter()
                .enumerate()
                .map(|(partition_id, p)| PartitionEntry {
                    partition_id,
                    size: p.len(),
                    root_component: p.provenance.as_ref().map(|pr| pr.root_component),
                    path: p.provenance.as_ref().map(Provenance::path_string),
                    warning: p.provenance.as_ref().and_then(|pr| pr.unsplit.clone()),
                })
                .collect(),
        }
    }
}
