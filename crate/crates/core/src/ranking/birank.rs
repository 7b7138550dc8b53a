use super::{BiRankParams, Normalization, NormalizedMatrix, RankError, RankResult, RestartVector};

/// BiRank on a degree-normalised person × company matrix `S`:
///
/// ```text
/// u <- alpha * S^T p + (1 - alpha) * u0     (companies)
/// p <- beta  * S   u + (1 - beta)  * p0     (persons, using the new u)
/// ```
///
/// starting from `(u0, p0)`, until the summed L1 change of both sides is at
/// most `epsilon` or `max_iter` iterations ran. Returns `(companies, persons)`.
pub fn birank(
    s: &NormalizedMatrix,
    u0: &RestartVector,
    p0: &RestartVector,
    params: &BiRankParams,
) -> Result<(RankResult, RankResult), RankError> {
    params.validate()?;
    if s.kind() != Normalization::SymmetricDegree {
        return Err(RankError::WrongNormalization {
            expected: Normalization::SymmetricDegree,
            got: s.kind(),
        });
    }
    let (n_persons, n_companies) = (s.matrix().nrows(), s.matrix().ncols());
    if u0.len() != n_companies {
        return Err(RankError::Dimension { expected: n_companies, got: u0.len() });
    }
    if p0.len() != n_persons {
        return Err(RankError::Dimension { expected: n_persons, got: p0.len() });
    }
    let (u0, p0) = (u0.as_slice(), p0.as_slice());
    let (alpha, beta) = (params.alpha, params.beta);

    let mut u = u0.to_vec();
    let mut p = p0.to_vec();
    let mut u_next = vec![0.0; n_companies];
    let mut p_next = vec![0.0; n_persons];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < params.max_iter && residual > params.epsilon {
        s.transposed().mul_vec_into(&p, &mut u_next);
        let mut change = 0.0;
        for i in 0..n_companies {
            u_next[i] = alpha * u_next[i] + (1.0 - alpha) * u0[i];
            change += (u_next[i] - u[i]).abs();
        }
        s.matrix().mul_vec_into(&u_next, &mut p_next);
        for j in 0..n_persons {
            p_next[j] = beta * p_next[j] + (1.0 - beta) * p0[j];
            change += (p_next[j] - p[j]).abs();
        }
        iterations += 1;
        residual = change;
        if !residual.is_finite() {
            return Err(RankError::NumericFailure { iteration: iterations });
        }
        std::mem::swap(&mut u, &mut u_next);
        std::mem::swap(&mut p, &mut p_next);
    }
    let converged = residual <= params.epsilon;
    Ok((
        RankResult {
            scores: u,
            iterations,
            final_residual: residual,
            converged,
        },
        RankResult {
            scores: p,
            iterations,
            final_residual: residual,
            converged,
        },
    ))
}
