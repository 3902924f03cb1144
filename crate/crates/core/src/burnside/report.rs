//! Census reports and their text, JSON and CSV renderings. All integers are written
//! as exact decimal strings.

use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::method_source;
use super::registry::known_values;
use crate::error::{Error, Result};
use crate::fixpoint::Method;
use crate::hypercube::CycleType;
use crate::BigCount;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Computed,
    Registry,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Computed => "computed",
            Source::Registry => "registry",
        }
    }
}

/// One row of a census: a cycle type, how many permutations have it, and its `φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleTypeEntry {
    pub cycle_type: CycleType,
    pub mu: BigCount,
    pub phi: BigCount,
    pub method: Method,
    pub source: Source,
}

impl CycleTypeEntry {
    pub fn new(cycle_type: CycleType, mu: BigCount, phi: BigCount, method: Method) -> Self {
        CycleTypeEntry {
            cycle_type,
            mu,
            phi,
            method,
            source: method_source(method),
        }
    }

    /// Whether `φ` equals the published value; `None` when nothing is published.
    pub fn matches_registry(&self) -> Option<bool> {
        known_values()
            .phi(&self.cycle_type)
            .ok()
            .map(|v| *v == self.phi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusReport {
    pub n: usize,
    pub entries: Vec<CycleTypeEntry>,
    /// `Σ μ φ` over the non-identity cycle types.
    pub partial_sum: BigCount,
    pub r: BigCount,
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    cycle_type: Vec<usize>,
    mu: String,
    phi: String,
    method: String,
    source: Source,
    matches_registry: Option<bool>,
}

#[derive(Serialize, Deserialize)]
struct ReportRecord {
    n: usize,
    entries: Vec<EntryRecord>,
    partial_sum: String,
    r: String,
}

fn parse_count(s: &str) -> Result<BigUint> {
    s.parse().map_err(|_| Error::Parse {
        input: s.to_string(),
        reason: "expected a decimal integer".into(),
    })
}

impl CensusReport {
    fn record(&self) -> ReportRecord {
        ReportRecord {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|e| EntryRecord {
                    cycle_type: e.cycle_type.lengths().collect(),
                    mu: e.mu.to_string(),
                    phi: e.phi.to_string(),
                    method: e.method.to_string(),
                    source: e.source,
                    matches_registry: e.matches_registry(),
                })
                .collect(),
            partial_sum: self.partial_sum.to_string(),
            r: self.r.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.record()).expect("report serializes")
    }

    /// Parses a report written by [`CensusReport::to_json`].
    pub fn from_json(text: &str) -> Result<CensusReport> {
        let rec: ReportRecord = serde_json::from_str(text).map_err(|e| Error::Parse {
            input: "report".into(),
            reason: e.to_string(),
        })?;
        let entries = rec
            .entries
            .into_iter()
            .map(|e| {
                let entry = CycleTypeEntry {
                    cycle_type: CycleType::new(e.cycle_type)?,
                    mu: parse_count(&e.mu)?,
                    phi: parse_count(&e.phi)?,
                    method: e.method.parse()?,
                    source: e.source,
                };
                Ok(entry)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CensusReport {
            n: rec.n,
            entries,
            partial_sum: parse_count(&rec.partial_sum)?,
            r: parse_count(&rec.r)?,
        })
    }

    /// One row per cycle type, then `partial_sum` and `r` rows carrying their value in
    /// the `phi` column.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "cycle_type",
            "mu",
            "phi",
            "method",
            "source",
            "matches_registry",
        ])
        .expect("in-memory write");
        for e in &self.record().entries {
            let lengths: Vec<String> = e.cycle_type.iter().map(|l| l.to_string()).collect();
            let matches = e.matches_registry.map_or(String::new(), |m| m.to_string());
            w.write_record([
                lengths.join(" ").as_str(),
                &e.mu,
                &e.phi,
                &e.method,
                e.source.name(),
                &matches,
            ])
            .expect("in-memory write");
        }
        for (label, value) in [("partial_sum", &self.partial_sum), ("r", &self.r)] {
            w.write_record([label, "", &value.to_string(), "", "", ""])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_text(&self) -> String {
        let rows: Vec<[String; 5]> = self
            .entries
            .iter()
            .map(|e| {
                let check = match e.matches_registry() {
                    Some(true) if e.source == Source::Computed => "match",
                    Some(false) => "MISMATCH",
                    _ => "",
                };
                [
                    e.cycle_type.notation(),
                    e.mu.to_string(),
                    e.phi.to_string(),
                    format!("{} ({})", e.method, e.source.name()),
                    check.to_string(),
                ]
            })
            .collect();
        let header = ["cycle type", "mu", "phi", "method", ""];
        let mut widths = header.map(str::len);
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: [&str; 5]| {
            let _ = writeln!(
                out,
                "{:<a$}  {:>b$}  {:>c$}  {:<d$}  {}",
                cells[0],
                cells[1],
                cells[2],
                cells[3],
                cells[4],
                a = widths[0],
                b = widths[1],
                c = widths[2],
                d = widths[3],
            );
        };
        line(&mut out, header);
        for r in &rows {
            line(&mut out, [&r[0], &r[1], &r[2], &r[3], &r[4]]);
        }
        let _ = writeln!(out, "partial sum (non-identity) = {}", self.partial_sum);
        let _ = writeln!(out, "r_{} = {}", self.n, self.r);
        out
    }
}
