use super::{Normalization, NormalizedMatrix, PageRankParams, RankError, RankResult, RestartVector};

/// Personalized PageRank: iterate `r <- alpha * A^T r + (1 - alpha) * e`
/// from `r = e` until the L2 change is at most `epsilon` or `max_iter`
/// iterations ran. Propagating through `A^T` sends each node's mass along
/// its out-edges. Isolated nodes keep a zero row, so their score is
/// `(1 - alpha) * e_i`.
pub fn pagerank(
    a: &NormalizedMatrix,
    e: &RestartVector,
    params: &PageRankParams,
) -> Result<RankResult, RankError> {
    params.validate()?;
    if a.kind() != Normalization::RowStochastic {
        return Err(RankError::WrongNormalization {
            expected: Normalization::RowStochastic,
            got: a.kind(),
        });
    }
    let n = a.matrix().nrows();
    if e.len() != n {
        return Err(RankError::Dimension { expected: n, got: e.len() });
    }
    let e = e.as_slice();
    let propagate = a.transposed();
    let (alpha, teleport) = (params.alpha, 1.0 - params.alpha);

    let mut r = e.to_vec();
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < params.max_iter && residual > params.epsilon {
        propagate.mul_vec_into(&r, &mut next);
        let mut sq = 0.0;
        for i in 0..n {
            next[i] = alpha * next[i] + teleport * e[i];
            let d = next[i] - r[i];
            sq += d * d;
        }
        iterations += 1;
        residual = sq.sqrt();
        if !residual.is_finite() {
            return Err(RankError::NumericFailure { iteration: iterations });
        }
        std::mem::swap(&mut r, &mut next);
    }
    Ok(RankResult {
        scores: r,
        iterations,
        final_residual: residual,
        converged: residual <= params.epsilon,
    })
}
