//! Edge-list and label files for built graphs.
//!
//! * bipartite: `company_id,person_id,weight`
//! * projection: `company_a,company_b,weight`
//! * company labels: `company_id,risk` with `risk` in `{0, 1, ""}` (empty = unknown)
//! * surrogates: `entity_id,company_surrogate_id,person_surrogate_id,weight`

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use thiserror::Error;

use super::{BipartiteEdge, BipartiteGraph, GraphError, RiskLabel, RiskVector, SurrogateMap, UnipartiteEdge, UnipartiteGraph};

#[derive(Debug, Error)]
pub enum GraphIoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(w)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).from_reader(r)
}

fn malformed(row: &csv::StringRecord, message: impl Into<String>) -> GraphIoError {
    GraphIoError::Malformed {
        line: row.position().map_or(0, |p| p.line()),
        message: message.into(),
    }
}

pub fn write_bipartite<W: Write>(w: W, g: &BipartiteGraph) -> Result<(), GraphIoError> {
    let mut wtr = writer(w);
    wtr.write_record(["company_id", "person_id", "weight"])?;
    for e in g.edges() {
        wtr.write_record([
            g.companies()[e.company].as_str(),
            g.persons()[e.person].as_str(),
            &e.weight.to_string(),
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_bipartite<R: Read>(r: R) -> Result<BipartiteGraph, GraphIoError> {
    let mut rows = Vec::new();
    for row in reader(r).records() {
        let row = row?;
        if row.len() != 3 {
            return Err(malformed(&row, "expected company_id,person_id,weight"));
        }
        let weight: u32 = row[2]
            .trim()
            .parse()
            .map_err(|_| malformed(&row, format!("bad weight `{}`", &row[2])))?;
        rows.push((row[0].to_string(), row[1].to_string(), weight));
    }
    let companies: Vec<String> = rows.iter().map(|r| r.0.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let persons: Vec<String> = rows.iter().map(|r| r.1.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let edges = rows
        .iter()
        .map(|(c, p, weight)| BipartiteEdge {
            company: companies.binary_search(c).unwrap(),
            person: persons.binary_search(p).unwrap(),
            weight: *weight,
        })
        .collect();
    Ok(BipartiteGraph::new(companies, persons, edges)?)
}

pub fn write_unipartite<W: Write>(w: W, g: &UnipartiteGraph) -> Result<(), GraphIoError> {
    let mut wtr = writer(w);
    wtr.write_record(["company_a", "company_b", "weight"])?;
    for e in g.edges() {
        wtr.write_record([
            g.nodes()[e.a].as_str(),
            g.nodes()[e.b].as_str(),
            &e.weight.to_string(),
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a projection edge list over a known node set (isolated companies
/// have no rows, so the node set comes from the bipartite graph).
pub fn read_unipartite<R: Read>(r: R, nodes: Vec<String>) -> Result<UnipartiteGraph, GraphIoError> {
    let index = |id: &str| nodes.binary_search_by(|x| x.as_str().cmp(id)).ok();
    let mut edges = Vec::new();
    for row in reader(r).records() {
        let row = row?;
        if row.len() != 3 {
            return Err(malformed(&row, "expected company_a,company_b,weight"));
        }
        let a = index(&row[0]).ok_or_else(|| malformed(&row, format!("unknown company `{}`", &row[0])))?;
        let b = index(&row[1]).ok_or_else(|| malformed(&row, format!("unknown company `{}`", &row[1])))?;
        let weight: f64 = row[2]
            .trim()
            .parse()
            .map_err(|_| malformed(&row, format!("bad weight `{}`", &row[2])))?;
        edges.push(UnipartiteEdge { a, b, weight });
    }
    Ok(UnipartiteGraph::new(nodes, edges)?)
}

pub fn write_company_risk<W: Write>(w: W, companies: &[String], risk: &RiskVector) -> Result<(), GraphIoError> {
    let mut wtr = writer(w);
    wtr.write_record(["company_id", "risk"])?;
    for (i, c) in companies.iter().enumerate() {
        let label = match risk.get(i) {
            RiskLabel::Compliant => "0",
            RiskLabel::Risk => "1",
            RiskLabel::Unknown => "",
        };
        wtr.write_record([c.as_str(), label])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads company labels and aligns them with `companies`; companies absent
/// from the file are unknown.
pub fn read_company_risk<R: Read>(r: R, companies: &[String]) -> Result<RiskVector, GraphIoError> {
    let mut by_id = BTreeMap::new();
    for row in reader(r).records() {
        let row = row?;
        if row.len() != 2 {
            return Err(malformed(&row, "expected company_id,risk"));
        }
        let label = match row[1].trim() {
            "0" => RiskLabel::Compliant,
            "1" => RiskLabel::Risk,
            "" => RiskLabel::Unknown,
            other => return Err(malformed(&row, format!("bad risk `{other}`"))),
        };
        by_id.insert(row[0].to_string(), label);
    }
    Ok(RiskVector::from_labels(
        companies
            .iter()
            .map(|c| by_id.get(c).copied().unwrap_or_default())
            .collect(),
    ))
}

pub fn write_surrogates<W: Write>(w: W, map: &SurrogateMap) -> Result<(), GraphIoError> {
    let mut wtr = writer(w);
    wtr.write_record(["entity_id", "company_surrogate_id", "person_surrogate_id", "weight"])?;
    for (id, pair) in map.iter() {
        wtr.write_record([
            id.as_str(),
            pair.company_id.as_str(),
            pair.person_id.as_str(),
            &pair.weight.to_string(),
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::project_unipartite;

    #[test]
    fn edge_lists_read_back() {
        let b = BipartiteGraph::from_id_edges([("a", "p", 3), ("b", "p", 1), ("c", "q", 5)]).unwrap();
        let mut buf = Vec::new();
        write_bipartite(&mut buf, &b).unwrap();
        assert_eq!(read_bipartite(buf.as_slice()).unwrap(), b);

        let u = project_unipartite(&b);
        let mut buf = Vec::new();
        write_unipartite(&mut buf, &u).unwrap();
        assert_eq!(read_unipartite(buf.as_slice(), b.companies().to_vec()).unwrap(), u);

        let risk = RiskVector::from_labels(vec![RiskLabel::Risk, RiskLabel::Unknown, RiskLabel::Compliant]);
        let mut buf = Vec::new();
        write_company_risk(&mut buf, b.companies(), &risk).unwrap();
        assert_eq!(read_company_risk(buf.as_slice(), b.companies()).unwrap(), risk);
    }

    #[test]
    fn unknown_company_in_projection_is_an_error() {
        let text = "company_a,company_b,weight\na,zzz,1\n";
        let err = read_unipartite(text.as_bytes(), vec!["a".into()]).unwrap_err();
        assert!(matches!(err, GraphIoError::Malformed { line: 2, .. }));
    }
}
