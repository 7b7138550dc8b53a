//! Synthetic director registers with planted risk homophily.
//!
//! Companies are grouped into clusters. Ordinary persons draw a degree from a
//! truncated power law and pick most of their companies inside a home
//! cluster. Hub persons direct many companies across the whole population,
//! which is what inflates the company projection. Risk is seeded at a base
//! rate and spread for one round along shared directors.
//!
//! Every stage draws from its own ChaCha8 stream, so switching hubs off
//! leaves all other directorships unchanged.

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::record::{ObservationWindow, RegisterRecord, RiskLabels, Role};

const DAYS_PER_YEAR: f64 = 365.2425;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    Invalid(String),
    #[error("infeasible degrees: {0}")]
    Infeasible(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub n_companies: usize,
    pub n_persons: usize,
    /// Mean number of companies per cluster.
    pub cluster_size: usize,
    /// Probability that an ordinary directorship leaves the home cluster.
    pub mixing: f64,
    /// Exponent of the person degree law `P(k) ~ k^-exponent`, `k = 1..=max_degree`.
    pub degree_exponent: f64,
    pub max_degree: usize,
    pub hub_count: usize,
    pub hub_degree: usize,
    pub tenure_min_years: f64,
    pub tenure_max_years: f64,
    /// Share of stints still active at the window end.
    pub open_stint_rate: f64,
    /// Share of directorships recorded as two separate stints.
    pub repeat_stint_rate: f64,
    /// Share of companies that are one-person enterprises (the owner is the company).
    pub one_person_rate: f64,
    /// Share of companies that also direct one to three companies of their cluster.
    pub managing_firm_rate: f64,
    pub base_rate: f64,
    pub homophily: f64,
    /// Expected spread per shared director is capped near `homophily * reach`.
    pub reach: f64,
    /// Share of companies whose risk label is published.
    pub label_coverage: f64,
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        paper_shape_preset()
    }
}

/// About 6000 companies and 10000 persons with 20 hubs of degree 80, sized
/// so the company projection has several times more edges than the
/// bipartite graph.
pub fn paper_shape_preset() -> GenConfig {
    let window = ObservationWindow::default();
    GenConfig {
        n_companies: 6000,
        n_persons: 10_000,
        cluster_size: 40,
        mixing: 0.1,
        degree_exponent: 3.0,
        max_degree: 12,
        hub_count: 20,
        hub_degree: 80,
        tenure_min_years: 0.1,
        tenure_max_years: 30.0,
        open_stint_rate: 0.25,
        repeat_stint_rate: 0.05,
        one_person_rate: 0.05,
        managing_firm_rate: 0.01,
        base_rate: 0.03,
        homophily: 0.6,
        reach: 3.0,
        label_coverage: 0.8,
        window_start: window.start(),
        window_end: window.end(),
        seed: 20_210_101,
    }
}

impl GenConfig {
    pub fn window(&self) -> Result<ObservationWindow, GenError> {
        ObservationWindow::new(self.window_start, self.window_end).map_err(|e| GenError::Invalid(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::Invalid(m));
        for (name, v) in [
            ("mixing", self.mixing),
            ("open_stint_rate", self.open_stint_rate),
            ("repeat_stint_rate", self.repeat_stint_rate),
            ("one_person_rate", self.one_person_rate),
            ("managing_firm_rate", self.managing_firm_rate),
            ("base_rate", self.base_rate),
            ("homophily", self.homophily),
            ("label_coverage", self.label_coverage),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} not in [0, 1]"));
            }
        }
        if self.n_companies == 0 || self.n_persons == 0 || self.cluster_size == 0 || self.max_degree == 0 {
            return bad("n_companies, n_persons, cluster_size and max_degree must be positive".into());
        }
        if !(self.degree_exponent > 0.0) || !(self.reach > 0.0) {
            return bad("degree_exponent and reach must be positive".into());
        }
        if !(self.tenure_min_years > 0.0 && self.tenure_min_years <= self.tenure_max_years) {
            return bad(format!(
                "tenure range [{}, {}] must be positive and ordered",
                self.tenure_min_years, self.tenure_max_years
            ));
        }
        self.window()?;
        if self.max_degree > self.n_companies {
            return Err(GenError::Infeasible(format!(
                "max_degree {} exceeds {} companies",
                self.max_degree, self.n_companies
            )));
        }
        if self.hub_count > 0 && self.hub_degree > self.n_companies {
            return Err(GenError::Infeasible(format!(
                "hub_degree {} exceeds {} companies",
                self.hub_degree, self.n_companies
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub company_id: String,
    pub cluster_id: usize,
    pub risk: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub records: Vec<RegisterRecord>,
    /// Published labels (a `label_coverage` share of companies).
    pub risk: RiskLabels,
    /// True risk of every company.
    pub truth: Vec<GroundTruth>,
    /// Configured degree of every ordinary person, in id order.
    pub person_degrees: Vec<usize>,
}

pub fn company_id(i: usize) -> String {
    format!("C{i:06}")
}

pub fn person_id(i: usize) -> String {
    format!("P{i:06}")
}

pub fn hub_id(i: usize) -> String {
    format!("H{i:04}")
}

/// Truncated discrete power law on `1..=max`.
#[derive(Debug, Clone)]
pub struct DegreeLaw {
    cdf: Vec<f64>,
}

impl DegreeLaw {
    pub fn new(exponent: f64, max: usize) -> Self {
        let weights: Vec<f64> = (1..=max).map(|k| (k as f64).powf(-exponent)).collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        DegreeLaw { cdf }
    }

    /// `P(K <= k)`.
    pub fn cdf(&self, k: usize) -> f64 {
        match k {
            0 => 0.0,
            k if k >= self.cdf.len() => 1.0,
            k => self.cdf[k - 1],
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c < u).min(self.cdf.len() - 1) + 1
    }
}

enum Stream {
    Clusters = 1,
    Persons,
    Hubs,
    Firms,
    Tenure,
    HubTenure,
    Risk,
    Labels,
}

fn stream(seed: u64, s: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s as u64);
    rng
}

struct Stints<'a> {
    cfg: &'a GenConfig,
    window_days: i64,
}

impl Stints<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng, person: &str, company: &str, out: &mut Vec<RegisterRecord>) {
        let cfg = self.cfg;
        let role = if rng.random_bool(0.5) {
            Role::ManagingDirector
        } else {
            Role::ShareholderManagingDirector
        };
        let years = rng.random_range(cfg.tenure_min_years..=cfg.tenure_max_years);
        let days = ((years * DAYS_PER_YEAR).round() as i64).clamp(1, self.window_days);
        let repeat = rng.random_bool(cfg.repeat_stint_rate) && days >= 2;
        let open = rng.random_bool(cfg.open_stint_rate);
        let pieces = if repeat {
            let first = rng.random_range(1..days);
            vec![first, days - first]
        } else {
            vec![days]
        };
        for (k, len) in pieces.iter().enumerate() {
            let last = k + 1 == pieces.len();
            let (start, end) = if open && last {
                (cfg.window_end - Duration::days(*len), None)
            } else {
                let offset = rng.random_range(0..=self.window_days - len);
                let start = cfg.window_start + Duration::days(offset);
                (start, Some(start + Duration::days(*len)))
            };
            out.push(RegisterRecord {
                person_id: person.to_string(),
                company_id: company.to_string(),
                role,
                start_date: start,
                end_date: end,
            });
        }
    }
}

/// Draws `k` distinct companies, each from `home` with probability
/// `1 - mixing` and from `pool` otherwise.
fn pick_companies(rng: &mut ChaCha8Rng, k: usize, home: &[usize], pool: &[usize], mixing: f64) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut attempts = 0;
    while chosen.len() < k {
        attempts += 1;
        // a saturated home cluster falls back to pool picks
        let from_pool = home.is_empty() || attempts > 20 * k || rng.random_bool(mixing);
        let c = if from_pool { *pool.choose(rng).unwrap() } else { *home.choose(rng).unwrap() };
        if !chosen.contains(&c) {
            chosen.push(c);
        }
    }
    chosen
}

pub fn generate(cfg: &GenConfig) -> Result<Generated, GenError> {
    cfg.validate()?;
    let n = cfg.n_companies;
    let window_days = (cfg.window_end - cfg.window_start).num_days();
    let stints = Stints { cfg, window_days };

    // clusters, one-person enterprises, managing firms
    let mut rng = stream(cfg.seed, Stream::Clusters);
    let n_clusters = n.div_ceil(cfg.cluster_size);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut cluster = vec![0usize; n];
    for (pos, &c) in order.iter().enumerate() {
        cluster[c] = pos % n_clusters;
    }
    let solo: Vec<bool> = (0..n).map(|_| rng.random_bool(cfg.one_person_rate)).collect();
    let firm: Vec<bool> = (0..n)
        .map(|c| !solo[c] && rng.random_bool(cfg.managing_firm_rate))
        .collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_clusters];
    for c in 0..n {
        if !solo[c] {
            members[cluster[c]].push(c);
        }
    }
    let open_pool: Vec<usize> = (0..n).filter(|&c| !solo[c]).collect();
    if open_pool.len() < cfg.max_degree {
        return Err(GenError::Infeasible(format!(
            "only {} companies can take outside directors, max_degree is {}",
            open_pool.len(),
            cfg.max_degree
        )));
    }

    // director sets: (director id, its companies)
    let mut directors: Vec<(String, Vec<usize>)> = Vec::new();
    let law = DegreeLaw::new(cfg.degree_exponent, cfg.max_degree);
    let mut rng = stream(cfg.seed, Stream::Persons);
    let mut person_degrees = Vec::with_capacity(cfg.n_persons);
    for p in 0..cfg.n_persons {
        let k = law.sample(&mut rng);
        let home = rng.random_range(0..n_clusters);
        let picks = pick_companies(&mut rng, k, &members[home], &open_pool, cfg.mixing);
        person_degrees.push(k);
        directors.push((person_id(p), picks));
    }
    // companies nobody directs get a director from their own cluster
    let mut covered = vec![false; n];
    for (_, cs) in &directors {
        for &c in cs {
            covered[c] = true;
        }
    }
    let mut by_cluster: Vec<Vec<usize>> = vec![Vec::new(); n_clusters];
    for (d, (_, cs)) in directors.iter().enumerate() {
        if let Some(&c) = cs.first() {
            by_cluster[cluster[c]].push(d);
        }
    }
    for c in 0..n {
        if solo[c] || covered[c] {
            continue;
        }
        let local = &by_cluster[cluster[c]];
        let d = if local.is_empty() {
            rng.random_range(0..directors.len())
        } else {
            *local.choose(&mut rng).unwrap()
        };
        directors[d].1.push(c);
        person_degrees[d] += 1;
        covered[c] = true;
    }

    let mut rng = stream(cfg.seed, Stream::Firms);
    for c in 0..n {
        if !firm[c] {
            continue;
        }
        let k = rng.random_range(1..=3usize);
        let targets: Vec<usize> = members[cluster[c]].iter().copied().filter(|&x| x != c).collect();
        let picks: Vec<usize> = targets.choose_multiple(&mut rng, k).copied().collect();
        if !picks.is_empty() {
            directors.push((company_id(c), picks));
        }
    }
    let ordinary = directors.len();

    let mut rng = stream(cfg.seed, Stream::Hubs);
    for h in 0..cfg.hub_count {
        let picks: Vec<usize> = open_pool.choose_multiple(&mut rng, cfg.hub_degree).copied().collect();
        directors.push((hub_id(h), picks));
    }

    // records
    let mut records = Vec::new();
    let mut rng = stream(cfg.seed, Stream::Tenure);
    for c in (0..n).filter(|&c| solo[c]) {
        let id = company_id(c);
        stints.draw(&mut rng, &id, &id, &mut records);
    }
    for (d, (who, cs)) in directors.iter().enumerate() {
        if d == ordinary {
            rng = stream(cfg.seed, Stream::HubTenure);
        }
        for &c in cs {
            stints.draw(&mut rng, who, &company_id(c), &mut records);
        }
    }
    records.sort_by(|a, b| {
        (&a.company_id, &a.person_id, a.start_date).cmp(&(&b.company_id, &b.person_id, b.start_date))
    });

    // risk: seeds, then one round of spread along shared directors
    let mut rng = stream(cfg.seed, Stream::Risk);
    let seed_risk: Vec<bool> = (0..n).map(|_| rng.random_bool(cfg.base_rate)).collect();
    let mut risk = seed_risk.clone();
    for (who, cs) in &directors {
        let mut group = cs.clone();
        // a managing firm shares its director with the companies it runs
        if let Some(idx) = who.strip_prefix('C').and_then(|s| s.parse::<usize>().ok()) {
            group.push(idx);
        }
        if group.len() < 2 {
            continue;
        }
        let p = (cfg.homophily * (cfg.reach / (group.len() - 1) as f64).min(1.0)).min(1.0);
        for &s in &group {
            if !seed_risk[s] {
                continue;
            }
            for &c in &group {
                if c != s && rng.random_bool(p) {
                    risk[c] = true;
                }
            }
        }
    }

    let mut rng = stream(cfg.seed, Stream::Labels);
    let mut labels = RiskLabels::new();
    for c in 0..n {
        if rng.random_bool(cfg.label_coverage) {
            labels.insert(company_id(c), risk[c]);
        }
    }
    let truth = (0..n)
        .map(|c| GroundTruth {
            company_id: company_id(c),
            cluster_id: cluster[c],
            risk: risk[c],
        })
        .collect();
    Ok(Generated {
        records,
        risk: labels,
        truth,
        person_degrees,
    })
}

pub fn write_ground_truth<W: std::io::Write>(w: W, truth: &[GroundTruth]) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["company_id", "cluster_id", "risk"])?;
    for t in truth {
        wtr.write_record([t.company_id.as_str(), &t.cluster_id.to_string(), if t.risk { "1" } else { "0" }])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Empirical person degree distribution of a generated register, by
/// director id, ignoring hubs, managing firms and one-person enterprises.
pub fn ordinary_degrees(records: &[RegisterRecord]) -> Vec<usize> {
    let mut by_person: BTreeMap<&str, std::collections::BTreeSet<&str>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.person_id.starts_with('P')) {
        by_person.entry(&r.person_id).or_default().insert(&r.company_id);
    }
    by_person.values().map(|s| s.len()).collect()
}
