use std::path::Path;
use std::time::Instant;

use log::info;
use serde::Serialize;

use crate::commands::rank::RankInputs;
use crate::config::RunConfig;
use crate::error::{CliError, Outcome};
use crate::files::{self, join};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchEntry {
    pub algorithm: String,
    pub mean_seconds: f64,
    /// Sample standard deviation; absent for a single repetition.
    pub sd_seconds: Option<f64>,
    pub run_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub repetitions: usize,
    pub partitions: usize,
    pub partition_companies: usize,
    pub folds: usize,
    pub threads: usize,
    pub algorithms: Vec<BenchEntry>,
}

pub fn mean_sd(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.len() > 1).then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (mean, sd)
}

/// Times full cross-validated runs of every selected algorithm on one
/// partition set. Repetitions alternate between algorithms.
pub fn cmd_bench(cfg: &RunConfig, graphs: &Path, partitions: &Path, out: &Path) -> Result<(BenchReport, Outcome), CliError> {
    let reps = cfg.bench.repetitions;
    if reps == 0 {
        return Err(CliError::input("repetitions must be at least 1"));
    }
    let inputs = RankInputs::load(cfg, graphs, partitions)?;
    let algorithms = RankInputs::algorithms(cfg);
    let mut times = vec![Vec::with_capacity(reps); algorithms.len()];
    let mut outcome = Outcome::default();
    for rep in 0..reps {
        for (a, algorithm) in algorithms.iter().enumerate() {
            let started = Instant::now();
            let scores = inputs.run(algorithm)?;
            let secs = started.elapsed().as_secs_f64();
            if rep == 0 && !scores.all_converged() {
                outcome.partial.push(format!(
                    "{}: {} of {} runs did not converge",
                    algorithm.name(),
                    scores.non_converged_runs,
                    scores.runs
                ));
            }
            info!("{} repetition {}: {secs:.3} s", algorithm.name(), rep + 1);
            times[a].push(secs);
        }
    }
    let report = BenchReport {
        repetitions: reps,
        partitions: inputs.set.len(),
        partition_companies: inputs.set.retained_count(),
        folds: inputs.folds.k,
        threads: rayon::current_num_threads(),
        algorithms: algorithms
            .iter()
            .zip(times)
            .map(|(algorithm, run_seconds)| {
                let (mean_seconds, sd_seconds) = mean_sd(&run_seconds);
                BenchEntry { algorithm: algorithm.name().to_string(), mean_seconds, sd_seconds, run_seconds }
            })
            .collect(),
    };
    files::ensure_dir(out)?;
    files::write_json(&join(out, files::BENCH), &report)?;
    Ok((report, outcome))
}
