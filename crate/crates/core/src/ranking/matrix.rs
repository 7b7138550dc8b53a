use super::RankError;
use crate::graph::{BipartiteGraph, UnipartiteGraph};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `A = D^-1 W`, rows of non-isolated nodes sum to one.
    RowStochastic,
    /// `S = D_p^-1/2 W D_c^-1/2` over a person × company biadjacency.
    SymmetricDegree,
}

/// Normalised sparse operator together with its transpose.
#[derive(Debug, Clone)]
pub struct NormalizedMatrix {
    kind: Normalization,
    matrix: CsrMatrix,
    transposed: CsrMatrix,
}

impl NormalizedMatrix {
    /// Row-normalises a square non-negative adjacency matrix. Zero rows stay zero.
    pub fn row_stochastic(adjacency: &CsrMatrix) -> Result<Self, RankError> {
        if let Some(&w) = adjacency.values().iter().find(|&&w| w < 0.0) {
            return Err(RankError::NegativeWeight(w));
        }
        let sums = adjacency.row_sums();
        let triplets: Vec<(usize, usize, f64)> = (0..adjacency.nrows())
            .flat_map(|r| {
                let s = sums[r];
                adjacency.row(r).map(move |(c, w)| (r, c, w / s))
            })
            .collect();
        let matrix = CsrMatrix::from_triplets(adjacency.nrows(), adjacency.ncols(), &triplets);
        Ok(NormalizedMatrix {
            kind: Normalization::RowStochastic,
            transposed: matrix.transpose(),
            matrix,
        })
    }

    /// Degree-normalises a non-negative person × company biadjacency matrix:
    /// `S_pc = W_pc / (sqrt(d_p) sqrt(d_c))` with weighted degrees.
    pub fn symmetric_degree(biadjacency: &CsrMatrix) -> Result<Self, RankError> {
        if let Some(&w) = biadjacency.values().iter().find(|&&w| w < 0.0) {
            return Err(RankError::NegativeWeight(w));
        }
        let row_deg = biadjacency.row_sums();
        let col_deg = biadjacency.transpose().row_sums();
        let triplets: Vec<(usize, usize, f64)> = (0..biadjacency.nrows())
            .flat_map(|r| {
                let dr = row_deg[r];
                let col_deg = &col_deg;
                biadjacency
                    .row(r)
                    .filter(|&(_, w)| w > 0.0)
                    .map(move |(c, w)| (r, c, w / (dr.sqrt() * col_deg[c].sqrt())))
            })
            .collect();
        let matrix = CsrMatrix::from_triplets(biadjacency.nrows(), biadjacency.ncols(), &triplets);
        Ok(NormalizedMatrix {
            kind: Normalization::SymmetricDegree,
            transposed: matrix.transpose(),
            matrix,
        })
    }

    pub fn kind(&self) -> Normalization {
        self.kind
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn transposed(&self) -> &CsrMatrix {
        &self.transposed
    }
}

/// Row-stochastic transition matrix of the company projection.
pub fn row_normalize(g: &UnipartiteGraph) -> NormalizedMatrix {
    let n = g.node_count();
    let triplets: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .flat_map(|e| [(e.a, e.b, e.weight), (e.b, e.a, e.weight)])
        .collect();
    NormalizedMatrix::row_stochastic(&CsrMatrix::from_triplets(n, n, &triplets))
        .expect("graph weights are positive")
}

/// `S` for BiRank; rows index persons, columns index companies.
pub fn symmetric_normalize(b: &BipartiteGraph) -> NormalizedMatrix {
    let triplets: Vec<(usize, usize, f64)> = b
        .edges()
        .iter()
        .map(|e| (e.person, e.company, e.weight as f64))
        .collect();
    let w = CsrMatrix::from_triplets(b.person_count(), b.company_count(), &triplets);
    NormalizedMatrix::symmetric_degree(&w).expect("graph weights are positive")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_rows() {
        let g = UnipartiteGraph::from_index_edges(2, &[(0, 1, 7.0)]).unwrap();
        let a = row_normalize(&g);
        assert_eq!(a.kind(), Normalization::RowStochastic);
        assert_eq!(a.matrix().get(0, 1), 1.0);
        assert_eq!(a.matrix().get(1, 0), 1.0);
    }

    #[test]
    fn weighted_row_and_isolated_node() {
        let g = UnipartiteGraph::from_index_edges(4, &[(0, 1, 1.0), (0, 2, 3.0)]).unwrap();
        let a = row_normalize(&g);
        assert_eq!(a.matrix().get(0, 1), 0.25);
        assert_eq!(a.matrix().get(0, 2), 0.75);
        assert_eq!(a.matrix().row(3).count(), 0);
        let sums = a.matrix().row_sums();
        assert_eq!(sums, vec![1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn negative_weight_rejected() {
        let w = CsrMatrix::from_triplets(2, 2, &[(0, 1, -1.0), (1, 0, -1.0)]);
        assert_eq!(NormalizedMatrix::row_stochastic(&w).unwrap_err(), RankError::NegativeWeight(-1.0));
        assert!(NormalizedMatrix::symmetric_degree(&w).is_err());
    }

    #[test]
    fn symmetric_normalization_values() {
        let b = BipartiteGraph::from_id_edges([("c", "p", 4)]).unwrap();
        assert_eq!(symmetric_normalize(&b).matrix().get(0, 0), 1.0);

        let b = BipartiteGraph::from_id_edges([("c", "p", 1)]).unwrap();
        assert_eq!(symmetric_normalize(&b).matrix().get(0, 0), 1.0);

        // person of weighted degree 3 over three degree-1 companies
        let b = BipartiteGraph::from_id_edges([("a", "p", 1), ("b", "p", 1), ("c", "p", 1)]).unwrap();
        let s = symmetric_normalize(&b);
        let expected = 1.0 / (3.0f64.sqrt() * 1.0f64.sqrt());
        for c in 0..3 {
            assert!((s.matrix().get(0, c) - expected).abs() < 1e-15);
            assert_eq!(s.transposed().get(c, 0), s.matrix().get(0, c));
        }
    }
}
