//! Register records, the observation window and the delimited-text readers
//! for record and risk files.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{Months, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("missing column `{0}` in header")]
    MissingColumn(&'static str),
    #[error("invalid record: {0}")]
    Invalid(String),
    #[error("observation window must satisfy start < end (got {start} .. {end})")]
    InvalidWindow { start: NaiveDate, end: NaiveDate },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Director function recorded in the register. Only these two are modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    ManagingDirector,
    ShareholderManagingDirector,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::ManagingDirector => "managing_director",
            Role::ShareholderManagingDirector => "shareholder_managing_director",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "managing_director" => Ok(Role::ManagingDirector),
            "shareholder_managing_director" => Ok(Role::ShareholderManagingDirector),
            other => Err(format!("unsupported role `{other}`")),
        }
    }
}

/// One directorship stint of a person at a company.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterRecord {
    pub person_id: String,
    pub company_id: String,
    pub role: Role,
    pub start_date: NaiveDate,
    /// `None` while the stint is still active.
    pub end_date: Option<NaiveDate>,
}

impl RegisterRecord {
    pub fn new(
        person_id: impl Into<String>,
        company_id: impl Into<String>,
        role: Role,
        start_date: NaiveDate,
        end_date: Option<NaiveDate>,
    ) -> Result<Self, RecordError> {
        let record = RegisterRecord {
            person_id: person_id.into(),
            company_id: company_id.into(),
            role,
            start_date,
            end_date,
        };
        record.validate().map_err(RecordError::Invalid)?;
        Ok(record)
    }

    fn validate(&self) -> Result<(), String> {
        if self.person_id.is_empty() {
            return Err("empty person_id".into());
        }
        if self.company_id.is_empty() {
            return Err("empty company_id".into());
        }
        if let Some(end) = self.end_date {
            if end < self.start_date {
                return Err(format!(
                    "end_date {end} precedes start_date {}",
                    self.start_date
                ));
            }
        }
        Ok(())
    }
}

/// Half-open calendar interval `[start, end)` outside of which stints are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationWindow {
    start: NaiveDate,
    end: NaiveDate,
}

impl ObservationWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self, RecordError> {
        if start >= end {
            return Err(RecordError::InvalidWindow { start, end });
        }
        Ok(ObservationWindow { start, end })
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    /// Intersects a stint with the window. Open-ended stints run to the window
    /// end. Returns `None` when nothing of the stint lies inside the window.
    pub fn clip(&self, start: NaiveDate, end: Option<NaiveDate>) -> Option<(NaiveDate, NaiveDate)> {
        let end = end.map_or(self.end, |e| e.min(self.end));
        let start = start.max(self.start);
        if start >= self.end || end < start || end <= self.start {
            return None;
        }
        Some((start, end))
    }
}

impl Default for ObservationWindow {
    /// Thirty years, 1991-01-01 up to 2021-01-01.
    fn default() -> Self {
        ObservationWindow {
            start: NaiveDate::from_ymd_opt(1991, 1, 1).unwrap(),
            end: NaiveDate::from_ymd_opt(2021, 1, 1).unwrap(),
        }
    }
}

/// Length of `[start, end)` in calendar years. Whole anniversaries count as
/// full years; the remainder is the fraction of the following year elapsed.
pub fn tenure_years(start: NaiveDate, end: NaiveDate) -> f64 {
    if end <= start {
        return 0.0;
    }
    let add_years = |y: u32| start.checked_add_months(Months::new(12 * y));
    // first guess from day count, then correct against actual anniversaries
    let mut years = ((end - start).num_days() / 366) as u32;
    while add_years(years + 1).is_some_and(|d| d <= end) {
        years += 1;
    }
    let anniversary = add_years(years).unwrap_or(start);
    let next = add_years(years + 1).unwrap_or(NaiveDate::MAX);
    let rest = (end - anniversary).num_days() as f64;
    let year_len = (next - anniversary).num_days() as f64;
    years as f64 + rest / year_len
}

/// Turns a (possibly summed) tenure into an integer edge weight: ceiling,
/// then clamped to `[1, max_weight]`.
pub fn weight_from_years(years: f64, max_weight: u32) -> u32 {
    // absorb accumulated rounding in sums of fractional stints
    let ceiled = (years - 1e-9).ceil();
    if ceiled < 1.0 {
        1
    } else if ceiled >= max_weight as f64 {
        max_weight
    } else {
        ceiled as u32
    }
}

/// Tenure weight of a single stint inside `window`, or `None` if the stint
/// lies entirely outside of it.
pub fn compute_edge_weight(
    start: NaiveDate,
    end: Option<NaiveDate>,
    window: &ObservationWindow,
    max_weight: u32,
) -> Option<u32> {
    let (s, e) = window.clip(start, end)?;
    Some(weight_from_years(tenure_years(s, e), max_weight))
}

/// Non-fatal parse diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedRecords {
    pub records: Vec<RegisterRecord>,
    pub warnings: Vec<ParseWarning>,
}

fn column(headers: &csv::StringRecord, name: &'static str) -> Result<usize, RecordError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or(RecordError::MissingColumn(name))
}

fn parse_date(raw: &str, line: u64, field: &str) -> Result<NaiveDate, RecordError> {
    NaiveDate::parse_from_str(raw.trim(), "%Y-%m-%d").map_err(|e| RecordError::Malformed {
        line,
        message: format!("bad {field} `{raw}`: {e}"),
    })
}

fn reader_builder(delimiter: u8) -> csv::ReaderBuilder {
    let mut builder = csv::ReaderBuilder::new();
    builder.delimiter(delimiter).has_headers(true).flexible(false);
    builder
}

/// Reads register records. Unsupported roles are skipped with a warning;
/// anything else that does not parse is an error naming the line.
pub fn read_records<R: Read>(reader: R, delimiter: u8) -> Result<ParsedRecords, RecordError> {
    let mut rdr = reader_builder(delimiter).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let person_col = column(&headers, "person_id")?;
    let company_col = column(&headers, "company_id")?;
    let role_col = column(&headers, "role")?;
    let start_col = column(&headers, "start_date")?;
    let end_col = column(&headers, "end_date")?;

    let mut out = ParsedRecords::default();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            RecordError::Malformed {
                line,
                message: e.to_string(),
            }
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or("").trim();

        let role = match field(role_col).parse::<Role>() {
            Ok(role) => role,
            Err(message) => {
                out.warnings.push(ParseWarning { line, message });
                continue;
            }
        };
        let start_date = parse_date(field(start_col), line, "start_date")?;
        let end_date = match field(end_col) {
            "" => None,
            raw => Some(parse_date(raw, line, "end_date")?),
        };
        let record = RegisterRecord {
            person_id: field(person_col).to_string(),
            company_id: field(company_col).to_string(),
            role,
            start_date,
            end_date,
        };
        record
            .validate()
            .map_err(|message| RecordError::Malformed { line, message })?;
        out.records.push(record);
    }
    Ok(out)
}

pub fn write_records<W: Write>(
    writer: W,
    records: &[RegisterRecord],
    delimiter: u8,
) -> Result<(), RecordError> {
    let mut wtr = csv::WriterBuilder::new().delimiter(delimiter).from_writer(writer);
    wtr.write_record(["person_id", "company_id", "role", "start_date", "end_date"])?;
    for r in records {
        let end = r.end_date.map(|d| d.to_string()).unwrap_or_default();
        wtr.write_record([
            r.person_id.as_str(),
            r.company_id.as_str(),
            r.role.as_str(),
            &r.start_date.to_string(),
            &end,
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Known risk labels keyed by source entity id. Absent ids are unknown.
pub type RiskLabels = BTreeMap<String, bool>;

/// Reads an `entity_id,risk` file with `risk` in `{0, 1}`.
pub fn read_risk<R: Read>(reader: R, delimiter: u8) -> Result<RiskLabels, RecordError> {
    let mut rdr = reader_builder(delimiter).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let id_col = column(&headers, "entity_id")?;
    let risk_col = column(&headers, "risk")?;
    let mut labels = RiskLabels::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let id = row.get(id_col).unwrap_or("").trim();
        if id.is_empty() {
            return Err(RecordError::Malformed {
                line,
                message: "empty entity_id".into(),
            });
        }
        let risk = match row.get(risk_col).unwrap_or("").trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(RecordError::Malformed {
                    line,
                    message: format!("risk must be 0 or 1, got `{other}`"),
                })
            }
        };
        labels.insert(id.to_string(), risk);
    }
    Ok(labels)
}

pub fn write_risk<W: Write>(writer: W, labels: &RiskLabels, delimiter: u8) -> Result<(), RecordError> {
    let mut wtr = csv::WriterBuilder::new().delimiter(delimiter).from_writer(writer);
    wtr.write_record(["entity_id", "risk"])?;
    for (id, &risk) in labels {
        wtr.write_record([id.as_str(), if risk { "1" } else { "0" }])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
