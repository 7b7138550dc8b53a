use crate::graph::UnipartiteGraph;

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Component label per node. Labels are numbered by the smallest node index
/// they contain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub labels: Vec<usize>,
    pub count: usize,
}

impl Components {
    /// Members of each component, ascending within and across components.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.count];
        for (node, &label) in self.labels.iter().enumerate() {
            groups[label].push(node);
        }
        groups
    }
}

pub fn connected_components(g: &UnipartiteGraph) -> Components {
    let n = g.node_count();
    let mut dsu = DisjointSets::new(n);
    for e in g.edges() {
        dsu.union(e.a, e.b);
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut labels = vec![0; n];
    let mut count = 0;
    for node in 0..n {
        let root = dsu.find(node);
        if label_of_root[root] == usize::MAX {
            label_of_root[root] = count;
            count += 1;
        }
        labels[node] = label_of_root[root];
    }
    Components { labels, count }
}

/// Connected pieces of the subgraph induced by `members` (sorted ascending)
/// over global adjacency lists.
pub(crate) fn components_within(adj: &[Vec<(usize, f64)>], members: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; members.len()];
    let mut pieces = Vec::new();
    let mut stack = Vec::new();
    for start in 0..members.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut piece = Vec::new();
        while let Some(local) = stack.pop() {
            let node = members[local];
            piece.push(node);
            for &(nb, _) in &adj[node] {
                if let Ok(l) = members.binary_search(&nb) {
                    if !seen[l] {
                        seen[l] = true;
                        stack.push(l);
                    }
                }
            }
        }
        piece.sort_unstable();
        pieces.push(piece);
    }
    pieces
}
