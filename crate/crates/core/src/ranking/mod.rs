//! Personalized PageRank on the company projection and BiRank on the
//! company–person graph, both as plain fixed-point iterations over sparse
//! matrices.

mod birank;
mod matrix;
mod pagerank;

pub use birank::birank;
pub use matrix::{row_normalize, symmetric_normalize, Normalization, NormalizedMatrix};
pub use pagerank::pagerank;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::RiskVector;

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix is {got:?}, expected {expected:?}")]
    WrongNormalization { expected: Normalization, got: Normalization },
    #[error("negative weight {0} in adjacency")]
    NegativeWeight(f64),
    #[error("non-finite value in iteration {iteration}")]
    NumericFailure { iteration: usize },
    #[error("restart entry {index} = {value} outside [0, 1]")]
    BadRestart { index: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PageRankParams {
    pub alpha: f64,
    /// Stop once the L2 change between iterates is at most this.
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            alpha: 0.85,
            epsilon: 1e-8,
            max_iter: 1000,
        }
    }
}

fn check_mixing(name: &str, value: f64) -> Result<(), RankError> {
    if !(0.0..1.0).contains(&value) {
        return Err(RankError::InvalidParams(format!("{name} = {value} not in [0, 1)")));
    }
    Ok(())
}

fn check_stopping(epsilon: f64, max_iter: usize) -> Result<(), RankError> {
    if !(epsilon > 0.0) {
        return Err(RankError::InvalidParams(format!("epsilon = {epsilon} must be > 0")));
    }
    if max_iter == 0 {
        return Err(RankError::InvalidParams("max_iter must be positive".into()));
    }
    Ok(())
}

impl PageRankParams {
    pub fn validate(&self) -> Result<(), RankError> {
        check_mixing("alpha", self.alpha)?;
        check_stopping(self.epsilon, self.max_iter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BiRankParams {
    /// Company-side propagation weight.
    pub alpha: f64,
    /// Person-side propagation weight.
    pub beta: f64,
    /// Stop once the summed L1 change of both sides is at most this.
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for BiRankParams {
    fn default() -> Self {
        BiRankParams {
            alpha: 0.85,
            beta: 0.85,
            epsilon: 1e-8,
            max_iter: 1000,
        }
    }
}

impl BiRankParams {
    pub fn validate(&self) -> Result<(), RankError> {
        check_mixing("alpha", self.alpha)?;
        check_mixing("beta", self.beta)?;
        check_stopping(self.epsilon, self.max_iter)
    }
}

/// Per-node prior blended into every iteration. Entries are kept raw (not
/// normalised to sum one).
#[derive(Debug, Clone, PartialEq)]
pub struct RestartVector(Vec<f64>);

impl RestartVector {
    pub fn new(values: Vec<f64>) -> Result<Self, RankError> {
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(RankError::BadRestart { index, value });
        }
        Ok(RestartVector(values))
    }

    pub fn zeros(n: usize) -> Self {
        RestartVector(vec![0.0; n])
    }

    /// 1.0 for known-risk companies that are not masked, 0.0 otherwise.
    pub fn from_risk(risk: &RiskVector, masked: impl Fn(usize) -> bool) -> Self {
        RestartVector(
            risk.labels()
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    if *l == crate::graph::RiskLabel::Risk && !masked(i) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankResult {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
}
