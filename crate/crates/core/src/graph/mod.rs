//! Company–person bipartite graph, its company–company projection, and the
//! per-company risk labels that travel with them.

mod build;
pub mod io;
mod project;
mod stats;

pub use build::{build_bipartite, split_surrogate, BuildConfig, BuildOutput, SkippedRecord, SurrogateMap, SurrogatePair};
pub use project::project_unipartite;
pub use stats::GraphStats;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default weight of the artificial edge joining the two halves of a split
/// entity; equals the largest tenure weight.
pub const DEFAULT_MAX_WEIGHT: u32 = 30;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(String, String),
    #[error("edge endpoint index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("non-positive weight {weight} on edge ({a}, {b})")]
    BadWeight { a: String, b: String, weight: f64 },
    #[error("node ids must be sorted and unique")]
    UnsortedNodes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Company,
    Person,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Company => "company",
            NodeKind::Person => "person",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteEdge {
    pub company: usize,
    pub person: usize,
    pub weight: u32,
}

/// Weighted company–person graph. Node lists are sorted by id, edges are
/// sorted by `(company, person)` and unique per pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BipartiteGraph {
    companies: Vec<String>,
    persons: Vec<String>,
    edges: Vec<BipartiteEdge>,
}

fn is_strictly_sorted(ids: &[String]) -> bool {
    ids.windows(2).all(|w| w[0] < w[1])
}

impl BipartiteGraph {
    pub fn new(
        companies: Vec<String>,
        persons: Vec<String>,
        mut edges: Vec<BipartiteEdge>,
    ) -> Result<Self, GraphError> {
        if !is_strictly_sorted(&companies) || !is_strictly_sorted(&persons) {
            return Err(GraphError::UnsortedNodes);
        }
        edges.sort_unstable_by_key(|e| (e.company, e.person));
        for e in &edges {
            if e.company >= companies.len() {
                return Err(GraphError::IndexOutOfRange(e.company));
            }
            if e.person >= persons.len() {
                return Err(GraphError::IndexOutOfRange(e.person));
            }
            if e.weight == 0 {
                return Err(GraphError::BadWeight {
                    a: companies[e.company].clone(),
                    b: persons[e.person].clone(),
                    weight: 0.0,
                });
            }
        }
        if let Some(w) = edges
            .windows(2)
            .find(|w| (w[0].company, w[0].person) == (w[1].company, w[1].person))
        {
            return Err(GraphError::DuplicateEdge(
                companies[w[0].company].clone(),
                persons[w[0].person].clone(),
            ));
        }
        Ok(BipartiteGraph {
            companies,
            persons,
            edges,
        })
    }

    /// Builds a graph from id-labelled edges; node sets are the endpoints.
    pub fn from_id_edges<'a, I>(edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (&'a str, &'a str, u32)>,
    {
        let edges: Vec<_> = edges.into_iter().collect();
        let mut companies: Vec<String> = edges.iter().map(|e| e.0.to_string()).collect();
        let mut persons: Vec<String> = edges.iter().map(|e| e.1.to_string()).collect();
        companies.sort_unstable();
        companies.dedup();
        persons.sort_unstable();
        persons.dedup();
        let indexed = edges
            .iter()
            .map(|&(c, p, weight)| BipartiteEdge {
                company: companies.binary_search_by(|x| x.as_str().cmp(c)).unwrap(),
                person: persons.binary_search_by(|x| x.as_str().cmp(p)).unwrap(),
                weight,
            })
            .collect();
        BipartiteGraph::new(companies, persons, indexed)
    }

    pub fn companies(&self) -> &[String] {
        &self.companies
    }

    pub fn persons(&self) -> &[String] {
        &self.persons
    }

    pub fn edges(&self) -> &[BipartiteEdge] {
        &self.edges
    }

    pub fn company_count(&self) -> usize {
        self.companies.len()
    }

    pub fn person_count(&self) -> usize {
        self.persons.len()
    }

    pub fn company_index(&self, id: &str) -> Option<usize> {
        self.companies.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    pub fn person_index(&self, id: &str) -> Option<usize> {
        self.persons.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    /// Incident `(company, weight)` lists per person, companies ascending.
    pub fn person_adjacency(&self) -> Vec<Vec<(usize, u32)>> {
        let mut adj = vec![Vec::new(); self.persons.len()];
        for e in &self.edges {
            adj[e.person].push((e.company, e.weight));
        }
        adj
    }

    pub fn company_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.companies.len()];
        for e in &self.edges {
            deg[e.company] += 1;
        }
        deg
    }

    pub fn person_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.persons.len()];
        for e in &self.edges {
            deg[e.person] += 1;
        }
        deg
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats::of_bipartite(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnipartiteEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Undirected weighted company–company graph stored as its upper triangle
/// (`a < b`), edges sorted and unique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UnipartiteGraph {
    nodes: Vec<String>,
    edges: Vec<UnipartiteEdge>,
}

impl UnipartiteGraph {
    /// Edges may be given in either orientation; they are stored with `a < b`.
    pub fn new(nodes: Vec<String>, edges: Vec<UnipartiteEdge>) -> Result<Self, GraphError> {
        if !is_strictly_sorted(&nodes) {
            return Err(GraphError::UnsortedNodes);
        }
        let mut edges: Vec<UnipartiteEdge> = edges
            .into_iter()
            .map(|e| UnipartiteEdge {
                a: e.a.min(e.b),
                b: e.a.max(e.b),
                weight: e.weight,
            })
            .collect();
        edges.sort_unstable_by_key(|e| (e.a, e.b));
        for e in &edges {
            if e.b >= nodes.len() {
                return Err(GraphError::IndexOutOfRange(e.b));
            }
            if e.a == e.b {
                return Err(GraphError::SelfLoop(nodes[e.a].clone()));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(GraphError::BadWeight {
                    a: nodes[e.a].clone(),
                    b: nodes[e.b].clone(),
                    weight: e.weight,
                });
            }
        }
        if let Some(w) = edges.windows(2).find(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b)) {
            return Err(GraphError::DuplicateEdge(
                nodes[w[0].a].clone(),
                nodes[w[0].b].clone(),
            ));
        }
        Ok(UnipartiteGraph { nodes, edges })
    }

    /// Unweighted-by-name convenience constructor, mostly for tests: nodes are
    /// `0..n` rendered with zero padding so that index order equals id order.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let width = n.max(1).to_string().len();
        let nodes = (0..n).map(|i| format!("n{i:0width$}")).collect();
        let edges = edges
            .iter()
            .map(|&(a, b, weight)| UnipartiteEdge { a, b, weight })
            .collect();
        UnipartiteGraph::new(nodes, edges)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[UnipartiteEdge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    /// Symmetric adjacency lists `(neighbour, weight)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.weight));
            adj[e.b].push((e.a, e.weight));
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(j, _)| j);
        }
        adj
    }

    /// Subgraph induced by `members` (indices into this graph, any order).
    /// Node order of the result follows id order.
    pub fn induced(&self, members: &[usize]) -> UnipartiteGraph {
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut local = vec![usize::MAX; self.nodes.len()];
        for (i, &m) in members.iter().enumerate() {
            local[m] = i;
        }
        let nodes = members.iter().map(|&m| self.nodes[m].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.a] != usize::MAX && local[e.b] != usize::MAX)
            .map(|e| UnipartiteEdge {
                a: local[e.a],
                b: local[e.b],
                weight: e.weight,
            })
            .collect();
        UnipartiteGraph { nodes, edges }
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats::of_unipartite(self)
    }
}

/// Label of a company as far as it is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskLabel {
    Compliant,
    Risk,
    #[default]
    Unknown,
}

impl RiskLabel {
    pub fn from_flag(risk: bool) -> Self {
        if risk {
            RiskLabel::Risk
        } else {
            RiskLabel::Compliant
        }
    }

    pub fn is_known(self) -> bool {
        self != RiskLabel::Unknown
    }

    pub fn as_flag(self) -> Option<bool> {
        match self {
            RiskLabel::Compliant => Some(false),
            RiskLabel::Risk => Some(true),
            RiskLabel::Unknown => None,
        }
    }
}

/// Risk labels aligned with the company nodes of some graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RiskVector(Vec<RiskLabel>);

impl RiskVector {
    pub fn unknown(n: usize) -> Self {
        RiskVector(vec![RiskLabel::Unknown; n])
    }

    pub fn from_labels(labels: Vec<RiskLabel>) -> Self {
        RiskVector(labels)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> RiskLabel {
        self.0.get(i).copied().unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, label: RiskLabel) {
        self.0[i] = label;
    }

    pub fn labels(&self) -> &[RiskLabel] {
        &self.0
    }

    /// `(compliant, risk)` counts.
    pub fn counts(&self) -> (usize, usize) {
        self.0.iter().fold((0, 0), |(n0, n1), l| match l {
            RiskLabel::Compliant => (n0 + 1, n1),
            RiskLabel::Risk => (n0, n1 + 1),
            RiskLabel::Unknown => (n0, n1),
        })
    }
}
