//! Dense and brute-force reference implementations, written from the
//! definitions and sharing no code with the library.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use riskrank::graph::{BipartiteGraph, UnipartiteGraph};

pub fn dense_transition(g: &UnipartiteGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut w = DMatrix::zeros(n, n);
    for e in g.edges() {
        w[(e.a, e.b)] += e.weight;
        w[(e.b, e.a)] += e.weight;
    }
    for i in 0..n {
        let s: f64 = w.row(i).sum();
        if s > 0.0 {
            w.row_mut(i).unscale_mut(s);
        }
    }
    w
}

/// r <- alpha A^T r + (1 - alpha) e, stopping on the L2 change.
pub fn dense_pagerank(a: &DMatrix<f64>, e: &DVector<f64>, alpha: f64, eps: f64, max_iter: usize) -> DVector<f64> {
    let at = a.transpose();
    let mut r = e.clone();
    for _ in 0..max_iter {
        let next = &at * &r * alpha + e * (1.0 - alpha);
        let change = (&next - &r).norm();
        r = next;
        if change <= eps {
            break;
        }
    }
    r
}

pub fn dense_s(b: &BipartiteGraph) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(b.person_count(), b.company_count());
    for e in b.edges() {
        w[(e.person, e.company)] = e.weight as f64;
    }
    let dp: Vec<f64> = (0..w.nrows()).map(|i| w.row(i).sum()).collect();
    let dc: Vec<f64> = (0..w.ncols()).map(|j| w.column(j).sum()).collect();
    DMatrix::from_fn(w.nrows(), w.ncols(), |i, j| {
        if w[(i, j)] > 0.0 {
            w[(i, j)] / (dp[i].sqrt() * dc[j].sqrt())
        } else {
            0.0
        }
    })
}

/// u <- alpha S^T p + (1 - alpha) u0, then p <- beta S u + (1 - beta) p0,
/// stopping on the summed L1 change of both.
pub fn dense_birank(
    s: &DMatrix<f64>,
    u0: &DVector<f64>,
    p0: &DVector<f64>,
    alpha: f64,
    beta: f64,
    eps: f64,
    max_iter: usize,
) -> (DVector<f64>, DVector<f64>) {
    let st = s.transpose();
    let (mut u, mut p) = (u0.clone(), p0.clone());
    for _ in 0..max_iter {
        let un = &st * &p * alpha + u0 * (1.0 - alpha);
        let pn = s * &un * beta + p0 * (1.0 - beta);
        let change = (&un - &u).lp_norm(1) + (&pn - &p).lp_norm(1);
        u = un;
        p = pn;
        if change <= eps {
            break;
        }
    }
    (u, p)
}

/// Company pairs and summed min-weights by direct enumeration over all
/// company pairs and all persons.
pub fn brute_force_projection(b: &BipartiteGraph) -> BTreeMap<(usize, usize), f64> {
    let n = b.company_count();
    let mut w = vec![vec![0u32; b.person_count()]; n];
    for e in b.edges() {
        w[e.company][e.person] = e.weight;
    }
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let total: u32 = (0..b.person_count())
                .filter(|&p| w[i][p] > 0 && w[j][p] > 0)
                .map(|p| w[i][p].min(w[j][p]))
                .sum();
            if total > 0 {
                out.insert((i, j), total as f64);
            }
        }
    }
    out
}

pub fn dense_laplacian(g: &UnipartiteGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        l[(e.a, e.b)] -= e.weight;
        l[(e.b, e.a)] -= e.weight;
        l[(e.a, e.a)] += e.weight;
        l[(e.b, e.b)] += e.weight;
    }
    l
}

/// Second-smallest eigenpair and the gap to the third.
pub fn dense_fiedler(g: &UnipartiteGraph) -> (f64, Vec<f64>, f64) {
    let eig = SymmetricEigen::new(dense_laplacian(g));
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (i2, i3) = (order[1], order[2]);
    let v = eig.eigenvectors.column(i2).iter().copied().collect();
    (eig.eigenvalues[i2], v, eig.eigenvalues[i3] - eig.eigenvalues[i2])
}

/// Sides agree up to a global flip, ignoring nodes whose dense entry is
/// within `tie` of zero.
pub fn same_split(iterative: &[f64], dense: &[f64], tol: f64, tie: f64) -> bool {
    let side = |x: f64| x > -tol;
    let check = |flip: bool| {
        iterative
            .iter()
            .zip(dense)
            .filter(|(_, d)| d.abs() > tie)
            .all(|(&a, &d)| side(a) == (side(d) != flip))
    };
    check(false) || check(true)
}
