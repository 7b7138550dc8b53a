use std::collections::{BTreeMap, BTreeSet};

use super::{BipartiteEdge, BipartiteGraph, RiskLabel, RiskVector, DEFAULT_MAX_WEIGHT};
use crate::record::{tenure_years, weight_from_years, ObservationWindow, RegisterRecord, RiskLabels};

const SURROGATE_MARK: char = '·';

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildConfig {
    /// Upper clamp for tenure weights and the weight of surrogate edges.
    pub max_weight: u32,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            max_weight: DEFAULT_MAX_WEIGHT,
        }
    }
}

/// The two node ids an entity is split into, plus the weight of the edge
/// joining them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurrogatePair {
    pub company_id: String,
    pub person_id: String,
    pub weight: u32,
}

/// Entities that occur both as a company and as a director (one-person
/// enterprises, managing firms), keyed by their source id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SurrogateMap {
    pairs: BTreeMap<String, SurrogatePair>,
}

impl SurrogateMap {
    pub fn get(&self, entity_id: &str) -> Option<&SurrogatePair> {
        self.pairs.get(entity_id)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &SurrogatePair)> {
        self.pairs.iter()
    }

    /// Source entity behind a company node id.
    pub fn source_of_company<'a>(&'a self, company_node: &'a str) -> &'a str {
        self.pairs
            .iter()
            .find(|(_, p)| p.company_id == company_node)
            .map_or(company_node, |(id, _)| id.as_str())
    }
}

/// Splits `entity_id` into a company surrogate and a person surrogate.
/// `is_taken` reports ids already used by source data; the suffix is
/// lengthened until neither surrogate collides.
pub fn split_surrogate(
    entity_id: &str,
    is_taken: impl Fn(&str) -> bool,
    max_weight: u32,
) -> SurrogatePair {
    let mut marks = String::from(SURROGATE_MARK);
    loop {
        let company_id = format!("{entity_id}{marks}c");
        let person_id = format!("{entity_id}{marks}p");
        if !is_taken(&company_id) && !is_taken(&person_id) {
            return SurrogatePair {
                company_id,
                person_id,
                weight: max_weight,
            };
        }
        marks.push(SURROGATE_MARK);
    }
}

/// Record that contributed nothing because it lies outside the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedRecord {
    /// Position in the input slice.
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub graph: BipartiteGraph,
    pub surrogates: SurrogateMap,
    /// Labels aligned with `graph.companies()`.
    pub risk: RiskVector,
    pub skipped: Vec<SkippedRecord>,
    /// Risk entries whose entity is not a company node of the graph.
    pub unmatched_risk: usize,
}

/// Builds the company–person graph. Repeated stints of one pair are summed
/// before rounding up; entities on both sides are split into surrogates.
pub fn build_bipartite(
    records: &[RegisterRecord],
    window: &ObservationWindow,
    risk: &RiskLabels,
    config: BuildConfig,
) -> BuildOutput {
    let mut skipped = Vec::new();
    let mut kept: Vec<(&RegisterRecord, f64)> = Vec::with_capacity(records.len());
    for (index, r) in records.iter().enumerate() {
        match window.clip(r.start_date, r.end_date) {
            Some((s, e)) => kept.push((r, tenure_years(s, e))),
            None => skipped.push(SkippedRecord {
                index,
                reason: format!(
                    "stint {}..{} of ({}, {}) outside observation window",
                    r.start_date,
                    r.end_date.map_or_else(|| "open".to_string(), |d| d.to_string()),
                    r.person_id,
                    r.company_id
                ),
            }),
        }
    }

    let company_src: BTreeSet<&str> = kept.iter().map(|(r, _)| r.company_id.as_str()).collect();
    let person_src: BTreeSet<&str> = kept.iter().map(|(r, _)| r.person_id.as_str()).collect();
    let mut surrogates = SurrogateMap::default();
    for &id in company_src.intersection(&person_src) {
        let pair = split_surrogate(
            id,
            |cand| company_src.contains(cand) || person_src.contains(cand),
            config.max_weight,
        );
        surrogates.pairs.insert(id.to_string(), pair);
    }

    let company_node = |id: &str| -> String {
        surrogates
            .get(id)
            .map_or_else(|| id.to_string(), |p| p.company_id.clone())
    };
    let person_node = |id: &str| -> String {
        surrogates
            .get(id)
            .map_or_else(|| id.to_string(), |p| p.person_id.clone())
    };

    let mut years: BTreeMap<(String, String), f64> = BTreeMap::new();
    for (r, y) in &kept {
        if r.person_id == r.company_id {
            // one-person enterprise: represented by the surrogate edge alone
            continue;
        }
        *years
            .entry((company_node(&r.company_id), person_node(&r.person_id)))
            .or_insert(0.0) += y;
    }

    let mut weights: BTreeMap<(String, String), u32> = years
        .into_iter()
        .map(|(k, y)| (k, weight_from_years(y, config.max_weight)))
        .collect();
    for pair in surrogates.pairs.values() {
        weights.insert((pair.company_id.clone(), pair.person_id.clone()), pair.weight);
    }

    let companies: Vec<String> = weights
        .keys()
        .map(|(c, _)| c.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let persons: Vec<String> = weights
        .keys()
        .map(|(_, p)| p.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let edges = weights
        .iter()
        .map(|((c, p), &weight)| BipartiteEdge {
            company: companies.binary_search(c).unwrap(),
            person: persons.binary_search(p).unwrap(),
            weight,
        })
        .collect();
    let graph = BipartiteGraph::new(companies, persons, edges)
        .expect("construction yields sorted unique nodes and edges");

    let company_sources: BTreeMap<&str, &str> = surrogates
        .iter()
        .map(|(id, p)| (p.company_id.as_str(), id.as_str()))
        .collect();
    let labels: Vec<RiskLabel> = graph
        .companies()
        .iter()
        .map(|c| {
            let source = company_sources.get(c.as_str()).copied().unwrap_or(c.as_str());
            risk.get(source)
                .map_or(RiskLabel::Unknown, |&r| RiskLabel::from_flag(r))
        })
        .collect();
    let matched: BTreeSet<&str> = graph
        .companies()
        .iter()
        .map(|c| company_sources.get(c.as_str()).copied().unwrap_or(c.as_str()))
        .collect();
    let unmatched_risk = risk.keys().filter(|k| !matched.contains(k.as_str())).count();

    BuildOutput {
        graph,
        surrogates,
        risk: RiskVector::from_labels(labels),
        skipped,
        unmatched_risk,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::Role;
    use chrono::NaiveDate;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn rec(p: &str, c: &str, s: NaiveDate, e: Option<NaiveDate>) -> RegisterRecord {
        RegisterRecord::new(p, c, Role::ManagingDirector, s, e).unwrap()
    }

    fn weight(g: &BipartiteGraph, c: &str, p: &str) -> Option<u32> {
        let (ci, pi) = (g.company_index(c)?, g.person_index(p)?);
        g.edges()
            .iter()
            .find(|e| e.company == ci && e.person == pi)
            .map(|e| e.weight)
    }

    #[test]
    fn one_director_two_companies() {
        // 1.5y and 4y
        let records = vec![
            rec("p", "a", d(2000, 1, 1), Some(d(2001, 7, 2))),
            rec("p", "b", d(2005, 3, 1), Some(d(2009, 3, 1))),
        ];
        let out = build_bipartite(&records, &ObservationWindow::default(), &RiskLabels::new(), BuildConfig::default());
        assert_eq!(out.graph.company_count(), 2);
        assert_eq!(out.graph.person_count(), 1);
        assert_eq!(weight(&out.graph, "a", "p"), Some(2));
        assert_eq!(weight(&out.graph, "b", "p"), Some(4));
        assert!(out.surrogates.is_empty());
    }

    #[test]
    fn repeated_stints_sum_before_ceiling() {
        // 0.5y (2001 is not leap: 182.5 days ~ Jan 1 .. Jul 2 12h) and 0.8y
        let first = (d(2001, 1, 1), d(2001, 7, 2));
        let second = (d(2003, 1, 1), d(2003, 10, 19));
        let y1 = tenure_years(first.0, first.1);
        let y2 = tenure_years(second.0, second.1);
        assert!((y1 - 0.5).abs() < 0.01 && (y2 - 0.8).abs() < 0.01);
        let records = vec![
            rec("p", "a", first.0, Some(first.1)),
            rec("p", "a", second.0, Some(second.1)),
        ];
        let out = build_bipartite(&records, &ObservationWindow::default(), &RiskLabels::new(), BuildConfig::default());
        assert_eq!(out.graph.edges().len(), 1);
        assert_eq!(out.graph.edges()[0].weight, 2);

        // two ~0.4y stints: ceil(0.8) = 1, per-stint rounding would give 2
        let records = vec![
            rec("p", "a", d(2001, 1, 1), Some(d(2001, 5, 27))),
            rec("p", "a", d(2003, 1, 1), Some(d(2003, 5, 27))),
        ];
        let out = build_bipartite(&records, &ObservationWindow::default(), &RiskLabels::new(), BuildConfig::default());
        assert_eq!(out.graph.edges()[0].weight, 1);
    }

    #[test]
    fn one_person_enterprise_is_split() {
        let records = vec![RegisterRecord::new(
            "x",
            "x",
            Role::ShareholderManagingDirector,
            d(2010, 1, 1),
            Some(d(2012, 1, 1)),
        )
        .unwrap()];
        let out = build_bipartite(&records, &ObservationWindow::default(), &RiskLabels::new(), BuildConfig::default());
        assert_eq!(out.graph.companies(), ["x·c"]);
        assert_eq!(out.graph.persons(), ["x·p"]);
        assert_eq!(weight(&out.graph, "x·c", "x·p"), Some(30));
    }

    #[test]
    fn managing_firm_is_split() {
        let records = vec![
            rec("f", "g", d(2010, 1, 1), Some(d(2012, 1, 1))),
            rec("q", "f", d(2010, 1, 1), Some(d(2011, 1, 1))),
        ];
        let mut risk = RiskLabels::new();
        risk.insert("f".into(), true);
        risk.insert("nobody".into(), false);
        let out = build_bipartite(&records, &ObservationWindow::default(), &risk, BuildConfig::default());
        let g = &out.graph;
        assert_eq!(weight(g, "g", "f·p"), Some(2));
        assert_eq!(weight(g, "f·c", "f·p"), Some(30));
        assert_eq!(weight(g, "f·c", "q"), Some(1));
        assert_eq!(out.risk.get(g.company_index("f·c").unwrap()), RiskLabel::Risk);
        assert_eq!(out.risk.get(g.company_index("g").unwrap()), RiskLabel::Unknown);
        assert_eq!(out.unmatched_risk, 1);
        assert_eq!(out.surrogates.source_of_company("f·c"), "f");
    }

    #[test]
    fn surrogate_weight_is_configurable() {
        let records = vec![
            rec("f", "g", d(2010, 1, 1), Some(d(2012, 1, 1))),
            rec("q", "f", d(2010, 1, 1), Some(d(2011, 1, 1))),
        ];
        let out = build_bipartite(&records, &ObservationWindow::default(), &RiskLabels::new(), BuildConfig { max_weight: 12 });
        assert_eq!(weight(&out.graph, "f·c", "f·p"), Some(12));
    }

    #[test]
    fn no_split_when_sides_are_disjoint() {
        let pair = split_surrogate("x", |_| false, 30);
        assert_eq!(pair, SurrogatePair { company_id: "x·c".into(), person_id: "x·p".into(), weight: 30 });
        let records = vec![rec("p", "a", d(2010, 1, 1), None)];
        let out = build_bipartite(&records, &ObservationWindow::default(), &RiskLabels::new(), BuildConfig::default());
        assert!(out.surrogates.is_empty());
    }

    #[test]
    fn surrogate_ids_avoid_source_ids() {
        let records = vec![
            rec("x", "x", d(2010, 1, 1), None),
            rec("x·p", "x·c", d(2010, 1, 1), None),
        ];
        let out = build_bipartite(&records, &ObservationWindow::default(), &RiskLabels::new(), BuildConfig::default());
        let pair = out.surrogates.get("x").unwrap();
        assert_eq!(pair.company_id, "x··c");
        assert_eq!(pair.person_id, "x··p");
        assert!(out.graph.company_index("x·c").is_some());
        assert!(out.graph.company_index("x··c").is_some());
    }

    #[test]
    fn empty_input_and_skips() {
        let out = build_bipartite(&[], &ObservationWindow::default(), &RiskLabels::new(), BuildConfig::default());
        assert_eq!(out.graph.company_count(), 0);
        let records = vec![rec("p", "a", d(1970, 1, 1), Some(d(1980, 1, 1)))];
        let out = build_bipartite(&records, &ObservationWindow::default(), &RiskLabels::new(), BuildConfig::default());
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.graph.edges().len(), 0);
    }
}
