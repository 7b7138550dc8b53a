use super::{BipartiteGraph, UnipartiteEdge, UnipartiteGraph};

/// Company–company projection. Every person of degree `d >= 2` contributes
/// all `d(d-1)/2` company pairs, each weighted by the smaller of the two
/// tenure weights; contributions of different persons to the same pair are
/// summed. Node order equals the bipartite company order.
pub fn project_unipartite(b: &BipartiteGraph) -> UnipartiteGraph {
    let mut pairs: Vec<(usize, usize, u32)> = Vec::new();
    for incident in b.person_adjacency() {
        for (i, &(a, wa)) in incident.iter().enumerate() {
            for &(c, wc) in &incident[i + 1..] {
                // incident lists are ascending, so a < c
                pairs.push((a, c, wa.min(wc)));
            }
        }
    }
    pairs.sort_unstable_by_key(|&(a, c, _)| (a, c));

    let mut edges: Vec<UnipartiteEdge> = Vec::new();
    for (a, c, w) in pairs {
        match edges.last_mut() {
            Some(last) if last.a == a && last.b == c => last.weight += w as f64,
            _ => edges.push(UnipartiteEdge {
                a,
                b: c,
                weight: w as f64,
            }),
        }
    }
    UnipartiteGraph::new(b.companies().to_vec(), edges).expect("projection is a simple graph")
}
