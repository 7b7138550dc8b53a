#![allow(dead_code)]

pub mod oracles;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riskrank::graph::{BipartiteEdge, BipartiteGraph, UnipartiteGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i:04}")).collect()
}

/// Random company × person graph, each pair present with probability `p`,
/// integer weights in 1..=30.
pub fn random_bipartite(rng: &mut ChaCha8Rng, companies: usize, persons: usize, p: f64) -> BipartiteGraph {
    let mut edges = Vec::new();
    for c in 0..companies {
        for q in 0..persons {
            if rng.random_bool(p) {
                edges.push(BipartiteEdge { company: c, person: q, weight: rng.random_range(1..=30) });
            }
        }
    }
    BipartiteGraph::new(ids("c", companies), ids("p", persons), edges).unwrap()
}

/// Random weighted simple graph; with `connected` a random spanning tree is
/// added first.
pub fn random_unipartite(rng: &mut ChaCha8Rng, n: usize, p: f64, connected: bool) -> UnipartiteGraph {
    let mut edges = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    if connected {
        for i in 1..n {
            let j = rng.random_range(0..i);
            seen.insert((j, i));
            edges.push((j, i, rng.random_range(0.5..5.0)));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if !seen.contains(&(i, j)) && rng.random_bool(p) {
                edges.push((i, j, rng.random_range(0.5..5.0)));
            }
        }
    }
    UnipartiteGraph::from_index_edges(n, &edges).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub struct Pipeline {
    pub bipartite: BipartiteGraph,
    pub projection: UnipartiteGraph,
    pub risk: riskrank::graph::RiskVector,
    pub set: riskrank::partition::PartitionSet,
}

/// Generated register of `companies` companies, built, projected and
/// partitioned with small thresholds.
pub fn small_pipeline(companies: usize, seed: u64) -> Pipeline {
    use riskrank::datagen::{generate, paper_shape_preset, GenConfig};
    use riskrank::graph::{build_bipartite, project_unipartite, BuildConfig};
    use riskrank::partition::{recursive_partition, PartitionConfig};

    let cfg = GenConfig {
        n_companies: companies,
        n_persons: companies * 5 / 3,
        hub_count: 2,
        hub_degree: 30,
        seed,
        ..paper_shape_preset()
    };
    let data = generate(&cfg).unwrap();
    let built = build_bipartite(&data.records, &cfg.window().unwrap(), &data.risk, BuildConfig::default());
    let projection = project_unipartite(&built.graph);
    let set = recursive_partition(&projection, &PartitionConfig { max_size: 200, min_size: 5, ..Default::default() }).unwrap();
    Pipeline { bipartite: built.graph, projection, risk: built.risk, set }
}
