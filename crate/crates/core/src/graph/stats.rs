use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BipartiteGraph, UnipartiteGraph};

/// Size summary of a graph. For a projection `person_nodes` is zero and the
/// person histogram is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub company_nodes: usize,
    pub person_nodes: usize,
    pub edges: usize,
    /// Edges over possible edges (company×person, or n(n-1)/2).
    pub density: f64,
    /// degree -> number of companies with that degree
    pub company_degree_histogram: BTreeMap<usize, usize>,
    pub person_degree_histogram: BTreeMap<usize, usize>,
}

fn histogram(degrees: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &d in degrees {
        *h.entry(d).or_insert(0) += 1;
    }
    h
}

impl GraphStats {
    pub fn of_bipartite(g: &BipartiteGraph) -> Self {
        let possible = g.company_count() * g.person_count();
        GraphStats {
            company_nodes: g.company_count(),
            person_nodes: g.person_count(),
            edges: g.edges().len(),
            density: if possible == 0 { 0.0 } else { g.edges().len() as f64 / possible as f64 },
            company_degree_histogram: histogram(&g.company_degrees()),
            person_degree_histogram: histogram(&g.person_degrees()),
        }
    }

    pub fn of_unipartite(g: &UnipartiteGraph) -> Self {
        let n = g.node_count();
        let mut degrees = vec![0; n];
        for e in g.edges() {
            degrees[e.a] += 1;
            degrees[e.b] += 1;
        }
        let possible = n * n.saturating_sub(1) / 2;
        GraphStats {
            company_nodes: n,
            person_nodes: 0,
            edges: g.edges().len(),
            density: if possible == 0 { 0.0 } else { g.edges().len() as f64 / possible as f64 },
            company_degree_histogram: histogram(&degrees),
            person_degree_histogram: BTreeMap::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::project_unipartite;

    #[test]
    fn empty_graph_is_all_zero() {
        let s = BipartiteGraph::default().stats();
        assert_eq!((s.company_nodes, s.person_nodes, s.edges), (0, 0, 0));
        assert_eq!(s.density, 0.0);
        assert!(s.company_degree_histogram.is_empty());
        let s = UnipartiteGraph::default().stats();
        assert_eq!((s.company_nodes, s.edges), (0, 0));
    }

    #[test]
    fn shared_person() {
        let b = BipartiteGraph::from_id_edges([("a", "p", 1), ("b", "p", 1)]).unwrap();
        let s = b.stats();
        assert_eq!((s.company_nodes, s.person_nodes, s.edges), (2, 1, 2));
        assert_eq!(s.person_degree_histogram.get(&2), Some(&1));
        assert_eq!(s.density, 1.0);
    }

    #[test]
    fn star_projection_edge_count() {
        for k in [1usize, 2, 5, 9] {
            let ids: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
            let b = BipartiteGraph::from_id_edges(ids.iter().map(|c| (c.as_str(), "hub", 2))).unwrap();
            let u = project_unipartite(&b);
            assert_eq!(u.stats().edges, k * (k - 1) / 2);
            assert_eq!(b.stats().edges, k);
        }
    }
}
