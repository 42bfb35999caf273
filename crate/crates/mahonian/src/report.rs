//! Serialization of distributions, labelings, traces, and check reports, and
//! the text renderings used by the command-line front end.
//!
//! All output is ASCII and byte-stable: JSON object keys are sorted, map
//! entries are emitted in a fixed order, and CSV rows follow a deterministic
//! sort.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Duration;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::bijections::{MapTrace, TraceEntry};
use crate::labeling::{InsertionAssignment, SpaceLabeling, SpaceTarget};
use crate::verify::{CheckReport, Counterexample, JointDistribution, Table1Row};
use crate::{Error, Result};

/// Version tag carried by every [`ReportDocument`].
pub const SCHEMA_VERSION: u32 = 1;

pub fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// A self-describing result document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool_version: String,
    pub parameters: BTreeMap<String, String>,
    pub payload: Payload,
}

impl ReportDocument {
    pub fn new(parameters: BTreeMap<String, String>, payload: Payload) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: tool_version().to_string(),
            parameters,
            payload,
        }
    }
}

/// The closed set of payload kinds a [`ReportDocument`] can carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Distribution(DistributionDoc),
    Labeling(LabelingDoc),
    Trace(TraceDoc),
    CheckReports(CheckReportsDoc),
    Table1(Table1Doc),
    Stats(StatsDoc),
}

impl Payload {
    fn kind(&self) -> &'static str {
        match self {
            Payload::Distribution(_) => "distribution",
            Payload::Labeling(_) => "labeling",
            Payload::Trace(_) => "trace",
            Payload::CheckReports(_) => "check_reports",
            Payload::Table1(_) => "table1",
            Payload::Stats(_) => "stats",
        }
    }
}

/// A sparse bivariate counting polynomial; counts are decimal strings so
/// arbitrary-size values survive JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionDoc {
    pub n: usize,
    pub stat1: String,
    pub stat2: String,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub t: u32,
    pub q: u32,
    pub count: String,
}

impl From<&JointDistribution> for DistributionDoc {
    fn from(d: &JointDistribution) -> Self {
        Self {
            n: d.n,
            stat1: d.stat1.clone(),
            stat2: d.stat2.clone(),
            terms: d
                .terms
                .iter()
                .map(|(&(t, q), count)| TermDoc {
                    t,
                    q,
                    count: count.to_string(),
                })
                .collect(),
        }
    }
}

impl DistributionDoc {
    pub fn to_joint(&self) -> Result<JointDistribution> {
        let mut joint = JointDistribution::new(self.n, self.stat1.clone(), self.stat2.clone());
        for term in &self.terms {
            let count = BigUint::from_str(&term.count)
                .map_err(|_| Error::MalformedReport(format!("bad count {:?}", term.count)))?;
            joint.terms.insert((term.t, term.q), count);
        }
        Ok(joint)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelingDoc {
    pub target: String,
    /// The interleaved elements (letters or indices), rendered.
    pub elements: Vec<String>,
    /// Label of each space, space 0 first.
    pub labels: Vec<u32>,
    /// Insertion letter per space, where defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub insertion_letters: Option<Vec<Option<u32>>>,
}

impl LabelingDoc {
    pub fn new(
        elements: Vec<String>,
        labeling: &SpaceLabeling,
        letters: Option<&InsertionAssignment>,
    ) -> Self {
        Self {
            target: match labeling.target() {
                SpaceTarget::WordSpaces => "word-spaces".to_string(),
                SpaceTarget::IndexSpaces => "index-spaces".to_string(),
            },
            elements,
            labels: labeling.labels().to_vec(),
            insertion_letters: letters.map(|l| l.letters().to_vec()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub map: String,
    pub result: String,
    pub entries: Vec<TraceEntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceEntryDoc {
    Word { name: String, letters: Vec<u32> },
    Value { name: String, value: i64 },
}

impl TraceDoc {
    pub fn new(trace: &MapTrace, result: String) -> Self {
        Self {
            map: trace.map.to_string(),
            result,
            entries: trace
                .entries
                .iter()
                .map(|e| match e {
                    TraceEntry::Word { name, letters } => TraceEntryDoc::Word {
                        name: name.clone(),
                        letters: letters.clone(),
                    },
                    TraceEntry::Value { name, value } => TraceEntryDoc::Value {
                        name: name.clone(),
                        value: *value,
                    },
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReportsDoc {
    pub reports: Vec<CheckReportDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReportDoc {
    pub name: String,
    pub params: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleDoc>,
    pub elapsed_micros: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleDoc {
    pub input: String,
    pub expected: String,
    pub actual: String,
}

impl From<&CheckReport> for CheckReportDoc {
    fn from(r: &CheckReport) -> Self {
        Self {
            name: r.name.clone(),
            params: r.params.clone(),
            pass: r.pass,
            counterexample: r.counterexample.as_ref().map(|c| CounterexampleDoc {
                input: c.input.clone(),
                expected: c.expected.clone(),
                actual: c.actual.clone(),
            }),
            elapsed_micros: r.elapsed.as_micros() as u64,
        }
    }
}

impl CheckReportDoc {
    pub fn to_report(&self) -> CheckReport {
        CheckReport {
            name: self.name.clone(),
            params: self.params.clone(),
            pass: self.pass,
            counterexample: self.counterexample.as_ref().map(|c| Counterexample {
                input: c.input.clone(),
                expected: c.expected.clone(),
                actual: c.actual.clone(),
            }),
            elapsed: Duration::from_micros(self.elapsed_micros),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Doc {
    pub rows: Vec<Table1Row>,
}

/// The statistics of a single permutation, as emitted by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsDoc {
    pub perm: String,
    pub n: usize,
    pub inv: u64,
    pub des: u64,
    pub maj: u64,
    pub exc: u64,
    pub den: u64,
    pub r: u32,
    pub rdes: u64,
    pub rmaj: u64,
    pub g: u32,
    pub ell: u32,
    pub gexc_l: u64,
    pub gden_l: u64,
    pub gden_gl: u64,
}

/// Serializes a document with sorted object keys.
pub fn to_json(doc: &ReportDocument) -> Result<String> {
    let value =
        serde_json::to_value(doc).map_err(|e| Error::Internal(format!("serialize: {e}")))?;
    serde_json::to_string_pretty(&value).map_err(|e| Error::Internal(format!("serialize: {e}")))
}

/// Parses a document, validating the schema version.
pub fn from_json(text: &str) -> Result<ReportDocument> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::MalformedReport(e.to_string()))?;
    let found = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::MalformedReport("missing schema_version".to_string()))?;
    if found != u64::from(SCHEMA_VERSION) {
        return Err(Error::SchemaMismatch {
            expected: SCHEMA_VERSION,
            found: found as u32,
        });
    }
    serde_json::from_value(value).map_err(|e| Error::MalformedReport(e.to_string()))
}

fn write_csv(rows: Vec<Vec<String>>) -> Result<String> {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    for row in rows {
        writer
            .write_record(&row)
            .map_err(|e| Error::Internal(format!("csv: {e}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(format!("csv: {e}")))
}

/// Renders the tabular payloads (distributions and the reference table) as
/// CSV; other payload kinds are rejected.
pub fn to_csv(payload: &Payload) -> Result<String> {
    match payload {
        Payload::Distribution(doc) => {
            let mut rows = vec![vec![
                "t_exp".to_string(),
                "q_exp".to_string(),
                "count".to_string(),
            ]];
            rows.extend(doc.terms.iter().map(|term| {
                vec![term.t.to_string(), term.q.to_string(), term.count.clone()]
            }));
            write_csv(rows)
        }
        Payload::Table1(doc) => {
            let mut rows = vec![vec![
                "perm".to_string(),
                "3des".to_string(),
                "3maj".to_string(),
                "2exc_2".to_string(),
                "2den_4".to_string(),
            ]];
            rows.extend(doc.rows.iter().map(|r| {
                vec![
                    r.perm.clone(),
                    r.rdes.to_string(),
                    r.rmaj.to_string(),
                    r.gexc.to_string(),
                    r.gden.to_string(),
                ]
            }));
            write_csv(rows)
        }
        other => Err(Error::NonTabularPayload(other.kind())),
    }
}

/// Renders a counting polynomial in the ASCII form
/// `1 + 3q + 5q^2 + ... + tq^3 + 2tq^4`, terms sorted by `(t, q)`.
pub fn render_polynomial(d: &JointDistribution) -> String {
    use num_traits::Zero;
    let mut parts = Vec::new();
    for (&(t, q), count) in &d.terms {
        if count.is_zero() {
            continue;
        }
        let mut term = String::new();
        let has_vars = t > 0 || q > 0;
        if !has_vars || count != &BigUint::from(1u32) {
            term.push_str(&count.to_string());
        }
        if t > 0 {
            term.push('t');
            if t > 1 {
                term.push_str(&format!("^{t}"));
            }
        }
        if q > 0 {
            term.push('q');
            if q > 1 {
                term.push_str(&format!("^{q}"));
            }
        }
        parts.push(term);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Two-row rendering of a labeling in the style used throughout: labels as
/// `_c` before each element, insertion letters aligned underneath.
pub fn render_labeling(
    elements: &[String],
    labeling: &SpaceLabeling,
    letters: Option<&InsertionAssignment>,
) -> String {
    let n = labeling.space_count();
    assert_eq!(elements.len() + 1, n, "one space more than elements");
    let letter_cell = |k: usize| {
        letters
            .and_then(|l| l.letter(k))
            .map(|v| v.to_string())
            .unwrap_or_default()
    };
    let mut top = Vec::new();
    let mut bottom = Vec::new();
    for (k, element) in elements.iter().enumerate() {
        top.push(format!("_{}", labeling.label_of_space(k)));
        bottom.push(letter_cell(k));
        top.push(element.clone());
        bottom.push(String::new());
    }
    top.push(format!("_{}", labeling.label_of_space(n - 1)));
    bottom.push(letter_cell(n - 1));
    let widths: Vec<usize> = top
        .iter()
        .zip(&bottom)
        .map(|(a, b)| a.len().max(b.len()))
        .collect();
    let render_row = |cells: &[String]| {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect::<Vec<_>>()
            .join(" ")
            .trim_end()
            .to_string()
    };
    if letters.is_some() {
        format!("{}\n{}", render_row(&top), render_row(&bottom))
    } else {
        render_row(&top)
    }
}

/// Plain-text table of the reference rows.
pub fn render_table1_text(rows: &[Table1Row]) -> String {
    let mut out = String::from("perm  3des  3maj  2exc_2  2den_4\n");
    for r in rows {
        out.push_str(&format!(
            "{:<5} {:<5} {:<5} {:<7} {}\n",
            r.perm, r.rdes, r.rmaj, r.gexc, r.gden
        ));
    }
    out
}
