//! Building, partitioning and ranking company–director networks for risk
//! scoring, with cross-validation and rank-based evaluation.

pub mod graph;
pub mod partition;
pub mod ranking;
pub mod record;
pub mod sparse;
pub mod crossval;
pub mod eval;
pub mod datagen;
