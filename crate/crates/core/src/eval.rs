//! Rank statistics over labeled companies: Spearman correlation against the
//! binary label, Mann–Whitney U, precision/recall of top-n selections and
//! equal-size target-chart bins.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("need at least {needed} scored labels, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("both label values must be present (n0 = {n0}, n1 = {n1})")]
    MissingClass { n0: usize, n1: usize },
    #[error("group {0} is empty")]
    EmptyGroup(usize),
    #[error("selection size {n_selected} outside 1..={n}")]
    BadSelection { n_selected: usize, n: usize },
    #[error("bin count {bins} outside 2..={n}")]
    BadBinCount { bins: usize, n: usize },
    #[error("non-finite score for `{0}`")]
    NonFinite(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScore {
    pub company_id: String,
    pub score: f64,
    pub label: bool,
}

impl LabeledScore {
    pub fn new(company_id: impl Into<String>, score: f64, label: bool) -> Self {
        LabeledScore {
            company_id: company_id.into(),
            score,
            label,
        }
    }
}

/// 1-based ranks in ascending order, ties sharing the mean of their ranks.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn tie_sizes(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sizes = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
        sizes.push(j);
        i += j;
    }
    sizes
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn check(data: &[LabeledScore]) -> Result<(usize, usize), EvalError> {
    if let Some(d) = data.iter().find(|d| !d.score.is_finite()) {
        return Err(EvalError::NonFinite(d.company_id.clone()));
    }
    let n1 = data.iter().filter(|d| d.label).count();
    Ok((data.len() - n1, n1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spearman {
    /// `None` when the scores are constant.
    pub rho: Option<f64>,
    pub p_value: Option<f64>,
}

/// Spearman's rho between scores and binary labels on midranks, with a
/// two-sided p-value from `t = rho * sqrt((n - 2) / (1 - rho^2))` on
/// `n - 2` degrees of freedom.
pub fn spearman(data: &[LabeledScore]) -> Result<Spearman, EvalError> {
    let (n0, n1) = check(data)?;
    if data.len() < 3 {
        return Err(EvalError::TooFew { needed: 3, got: data.len() });
    }
    if n0 == 0 || n1 == 0 {
        return Err(EvalError::MissingClass { n0, n1 });
    }
    let scores: Vec<f64> = data.iter().map(|d| d.score).collect();
    let labels: Vec<f64> = data.iter().map(|d| if d.label { 1.0 } else { 0.0 }).collect();
    let rho = pearson(&midranks(&scores), &midranks(&labels));
    let p_value = rho.map(|rho| {
        if rho.abs() >= 1.0 {
            return 0.0;
        }
        let df = (data.len() - 2) as f64;
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
        (2.0 * dist.sf(t.abs())).min(1.0)
    });
    Ok(Spearman { rho, p_value })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U of group 1: how often a group-1 score beats a group-0 score (ties half).
    pub u: f64,
    pub z: f64,
    pub p_value: f64,
}

/// Mann–Whitney U with tie-corrected normal approximation, no continuity
/// correction. `Z > 0` means group 1 tends to score higher. When every value
/// is tied the variance vanishes and `Z = 0`, `p = 1`.
pub fn mann_whitney(group0: &[f64], group1: &[f64]) -> Result<MannWhitney, EvalError> {
    if group0.is_empty() {
        return Err(EvalError::EmptyGroup(0));
    }
    if group1.is_empty() {
        return Err(EvalError::EmptyGroup(1));
    }
    let (n0, n1) = (group0.len() as f64, group1.len() as f64);
    let all: Vec<f64> = group0.iter().chain(group1).copied().collect();
    let ranks = midranks(&all);
    let r1: f64 = ranks[group0.len()..].iter().sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    let n = n0 + n1;
    let ties: f64 = tie_sizes(&all).iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = n0 * n1 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    let (z, p_value) = if var > 0.0 {
        let z = (u - n0 * n1 / 2.0) / var.sqrt();
        let normal = Normal::standard();
        (z, (2.0 * normal.sf(z.abs())).min(1.0))
    } else {
        (0.0, 1.0)
    };
    Ok(MannWhitney { u, z, p_value })
}

/// Indices sorted by score descending, ties broken by company id ascending.
pub fn ranked_order(data: &[LabeledScore]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| match data[b].score.total_cmp(&data[a].score) {
        Ordering::Equal => data[a].company_id.cmp(&data[b].company_id),
        o => o,
    });
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub n_selected: usize,
    pub precision: f64,
    pub recall: f64,
}

/// Precision and recall of the `n_selected` best-scored companies.
pub fn precision_recall_at(data: &[LabeledScore], n_selected: usize) -> Result<PrPoint, EvalError> {
    Ok(pr_curve(data, &[n_selected])?[0])
}

/// Precision/recall at each requested selection size.
pub fn pr_curve(data: &[LabeledScore], selections: &[usize]) -> Result<Vec<PrPoint>, EvalError> {
    let (n0, n1) = check(data)?;
    if n1 == 0 {
        return Err(EvalError::MissingClass { n0, n1 });
    }
    let n = data.len();
    let order = ranked_order(data);
    let mut hits = Vec::with_capacity(n + 1);
    hits.push(0usize);
    for &i in &order {
        hits.push(hits.last().unwrap() + data[i].label as usize);
    }
    selections
        .iter()
        .map(|&k| {
            if k == 0 || k > n {
                return Err(EvalError::BadSelection { n_selected: k, n });
            }
            Ok(PrPoint {
                n_selected: k,
                precision: hits[k] as f64 / k as f64,
                recall: hits[k] as f64 / n1 as f64,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetBin {
    pub bin: usize,
    pub size: usize,
    pub positives: usize,
    pub positive_rate: f64,
    /// Positive rate over the overall rate; `None` without positives.
    pub lift: Option<f64>,
}

/// Ranked companies cut into `bin_count` consecutive bins of equal size,
/// the first `n % bin_count` bins one larger.
pub fn target_chart(data: &[LabeledScore], bin_count: usize) -> Result<Vec<TargetBin>, EvalError> {
    let (_, n1) = check(data)?;
    let n = data.len();
    if bin_count < 2 || bin_count > n {
        return Err(EvalError::BadBinCount { bins: bin_count, n });
    }
    let overall = n1 as f64 / n as f64;
    let order = ranked_order(data);
    let (base, extra) = (n / bin_count, n % bin_count);
    let mut start = 0;
    Ok((0..bin_count)
        .map(|bin| {
            let size = base + usize::from(bin < extra);
            let positives = order[start..start + size].iter().filter(|&&i| data[i].label).count();
            start += size;
            let positive_rate = positives as f64 / size as f64;
            TargetBin {
                bin,
                size,
                positives,
                positive_rate,
                lift: (n1 > 0).then(|| positive_rate / overall),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub algorithm: String,
    pub n: usize,
    pub n0: usize,
    pub n1: usize,
    /// Companies that received a score, labeled or not.
    pub scored: usize,
    pub rho: Option<f64>,
    pub rho_p: Option<f64>,
    pub u: f64,
    pub z: f64,
    pub z_p: f64,
    pub pr_curve: Vec<PrPoint>,
    pub target_bins: Vec<TargetBin>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalOptions {
    pub bin_count: usize,
    /// Curve points at `1/steps, 2/steps, ..., 1` of the labeled population.
    pub pr_steps: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { bin_count: 20, pr_steps: 100 }
    }
}

/// Selection size for a fraction of `n`, rounded and kept within `1..=n`.
pub fn selection_size(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).round() as usize).clamp(1, n.max(1))
}

/// All statistics for one algorithm. `data` holds labeled companies only;
/// `scored` is the total number of companies that got a score.
pub fn evaluate(algorithm: &str, data: &[LabeledScore], scored: usize, opts: &EvalOptions) -> Result<MetricReport, EvalError> {
    let (n0, n1) = check(data)?;
    if n0 == 0 || n1 == 0 {
        return Err(EvalError::MissingClass { n0, n1 });
    }
    let n = data.len();
    let rho = spearman(data)?;
    let g0: Vec<f64> = data.iter().filter(|d| !d.label).map(|d| d.score).collect();
    let g1: Vec<f64> = data.iter().filter(|d| d.label).map(|d| d.score).collect();
    let mw = mann_whitney(&g0, &g1)?;
    let steps = opts.pr_steps.max(1);
    let mut selections: Vec<usize> = (1..=steps).map(|s| selection_size(n, s as f64 / steps as f64)).collect();
    selections.dedup();
    Ok(MetricReport {
        algorithm: algorithm.to_string(),
        n,
        n0,
        n1,
        scored,
        rho: rho.rho,
        rho_p: rho.p_value,
        u: mw.u,
        z: mw.z,
        z_p: mw.p_value,
        pr_curve: pr_curve(data, &selections)?,
        target_bins: target_chart(data, opts.bin_count.min(n))?,
    })
}
