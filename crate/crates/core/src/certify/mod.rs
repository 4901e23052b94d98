//! Experimental tables, noise estimation and certification of the quantum advantage.
//!
//! The printed tables ship with the crate as CSV fixtures and are stored
//! exactly as printed, including a repeated row in the exclusivity table.
//! Three schemas are used:
//!
//! | file        | columns                                          |
//! |-------------|--------------------------------------------------|
//! | `sigma.csv` | `state_code,value,uncertainty`                   |
//! | `edges.csv` | `i,j,value`                                      |
//! | `terms.csv` | `state_code,context,outcomes,value,uncertainty`  |
//!
//! `sigma.csv` holds both Σ and ξ tables. A blank uncertainty means none was
//! printed. Lines starting with `#` are ignored.

mod analysis;
mod svg;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ksets::StateCode;
use crate::quantum::Proposition;

pub use analysis::{
    advantage_threshold, certify, compare_xi, corrected_classical_bound, estimate_epsilon,
    expected_band, recompute_xi_from_terms, summary_statistics, CertificationReport,
    EpsilonEstimate, NoiseParams, StateVerdict, Summary, ThresholdCheck, Verdict, XiComparison,
    XiSum, PAPER_THRESHOLD, QUANTUM_VALUE,
};
pub use svg::band_chart;

/// Environment variable naming a directory whose CSV files replace the embedded ones.
pub const FIXTURES_ENV: &str = "KS_FIXTURES_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Sigma,
    Xi,
    EdgeProbability,
    TermProbability,
}

impl Quantity {
    fn header(self) -> &'static [&'static str] {
        match self {
            Quantity::Sigma | Quantity::Xi => &["state_code", "value", "uncertainty"],
            Quantity::EdgeProbability => &["i", "j", "value"],
            Quantity::TermProbability => {
                &["state_code", "context", "outcomes", "value", "uncertainty"]
            }
        }
    }

    fn range(self) -> (f64, f64) {
        match self {
            Quantity::Sigma | Quantity::Xi => (0.0, 18.0),
            Quantity::EdgeProbability | Quantity::TermProbability => (0.0, 1.0),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Sigma => "sigma",
            Quantity::Xi => "xi",
            Quantity::EdgeProbability => "edge-probability",
            Quantity::TermProbability => "term-probability",
        })
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "sigma" | "σ" => Ok(Quantity::Sigma),
            "xi" | "ξ" => Ok(Quantity::Xi),
            "edge-probability" | "edges" => Ok(Quantity::EdgeProbability),
            "term-probability" | "terms" => Ok(Quantity::TermProbability),
            _ => Err(Error::Parse {
                line: 0,
                message: format!("unknown quantity `{s}`"),
            }),
        }
    }
}

/// What a record measures beyond its state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RecordKey {
    /// The whole figure of merit for one state.
    Total,
    /// `P_{v_j}(Π_i = 1)`: state `v_i` prepared, test `j` answered yes.
    Edge { i: u32, j: u32 },
    Term { proposition: Proposition },
}

/// One printed entry. The printed text is kept next to the parsed numbers
/// so a table exports back to the same characters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub state: Option<StateCode>,
    pub quantity: Quantity,
    pub key: RecordKey,
    pub value: f64,
    pub uncertainty: Option<f64>,
    #[serde(skip)]
    printed_value: String,
    #[serde(skip)]
    printed_uncertainty: String,
}

impl MeasurementRecord {
    /// A Σ or ξ value for `state`.
    pub fn total(state: StateCode, quantity: Quantity, value: f64, uncertainty: Option<f64>) -> Self {
        Self::from_numbers(Some(state), quantity, RecordKey::Total, value, uncertainty)
    }

    pub fn edge(i: u32, j: u32, value: f64) -> Self {
        Self::from_numbers(None, Quantity::EdgeProbability, RecordKey::Edge { i, j }, value, None)
    }

    pub fn term(state: StateCode, proposition: Proposition, value: f64, uncertainty: Option<f64>) -> Self {
        Self::from_numbers(
            Some(state),
            Quantity::TermProbability,
            RecordKey::Term { proposition },
            value,
            uncertainty,
        )
    }

    fn from_numbers(
        state: Option<StateCode>,
        quantity: Quantity,
        key: RecordKey,
        value: f64,
        uncertainty: Option<f64>,
    ) -> Self {
        MeasurementRecord {
            state,
            quantity,
            key,
            value,
            uncertainty,
            printed_value: value.to_string(),
            printed_uncertainty: uncertainty.map(|u| u.to_string()).unwrap_or_default(),
        }
    }

    /// Human-readable name used in errors and flags, such as `v1 P(001|012)`.
    pub fn name(&self) -> String {
        let state = self.state.map(|s| s.to_string()).unwrap_or_default();
        match self.key {
            RecordKey::Total => format!("{state} {}", self.quantity),
            RecordKey::Edge { i, j } => format!("p_{{{i},{j}}}"),
            RecordKey::Term { proposition } => format!("{state} {proposition}"),
        }
    }

    /// The value exactly as it appeared in the source.
    pub fn printed_value(&self) -> &str {
        &self.printed_value
    }

    fn check_range(&self) -> Result<()> {
        let (min, max) = self.quantity.range();
        if !(min..=max).contains(&self.value) {
            return Err(Error::ValueOutOfRange {
                record: self.name(),
                value: self.value,
                min,
                max,
            });
        }
        if let Some(u) = self.uncertainty {
            if !(u >= 0.0 && u.is_finite()) {
                return Err(Error::ValueOutOfRange {
                    record: format!("{} uncertainty", self.name()),
                    value: u,
                    min: 0.0,
                    max: f64::INFINITY,
                });
            }
        }
        Ok(())
    }
}

/// A key that occurs more than once, with the source lines involved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DuplicateKey {
    pub key: String,
    pub lines: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DedupePolicy {
    KeepFirst,
    #[default]
    KeepAll,
}

impl FromStr for DedupePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "keep-first" => Ok(DedupePolicy::KeepFirst),
            "keep-all" => Ok(DedupePolicy::KeepAll),
            _ => Err(Error::Parse {
                line: 0,
                message: format!("unknown dedupe policy `{s}`"),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub quantity: Quantity,
    pub records: Vec<MeasurementRecord>,
    pub duplicates: Vec<DuplicateKey>,
}

impl Table {
    /// Applies `policy`; the duplicate flags are kept either way.
    pub fn dedupe(mut self, policy: DedupePolicy) -> Self {
        if policy == DedupePolicy::KeepFirst {
            let mut seen = std::collections::HashSet::new();
            self.records.retain(|r| seen.insert((r.state, r.key)));
        }
        self
    }

    pub fn to_csv(&self) -> String {
        export_table(self.quantity, &self.records)
    }
}

/// The tables bundled with the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableId {
    /// Σ for 15 states with uncertainties.
    SigmaSelected,
    /// ξ for the same 15 states.
    Xi,
    /// Σ for all 28 states, no uncertainties printed.
    SigmaAll,
    /// Exclusivity probabilities `p_{i,j}`.
    Exclusivity,
    /// ξ terms for contexts 012 and 036.
    TermsA,
    /// ξ terms for contexts 345 and 147.
    TermsB,
    /// ξ terms for contexts 678 and 258.
    TermsC,
}

impl TableId {
    pub fn all() -> [TableId; 7] {
        use TableId::*;
        [SigmaSelected, Xi, SigmaAll, Exclusivity, TermsA, TermsB, TermsC]
    }

    pub fn file_name(self) -> &'static str {
        match self {
            TableId::SigmaSelected => "table1_sigma.csv",
            TableId::Xi => "table2_xi.csv",
            TableId::SigmaAll => "table4_sigma.csv",
            TableId::Exclusivity => "table5_edges.csv",
            TableId::TermsA => "table6_terms.csv",
            TableId::TermsB => "table7_terms.csv",
            TableId::TermsC => "table8_terms.csv",
        }
    }

    /// Short id accepted on the command line: `table1`, `table2`, `table4` … `table8`.
    pub fn id(self) -> &'static str {
        self.file_name().split('_').next().expect("non-empty")
    }

    pub fn quantity(self) -> Quantity {
        match self {
            TableId::SigmaSelected | TableId::SigmaAll => Quantity::Sigma,
            TableId::Xi => Quantity::Xi,
            TableId::Exclusivity => Quantity::EdgeProbability,
            TableId::TermsA | TableId::TermsB | TableId::TermsC => Quantity::TermProbability,
        }
    }

    fn embedded(self) -> &'static str {
        match self {
            TableId::SigmaSelected => include_str!("../../data/table1_sigma.csv"),
            TableId::Xi => include_str!("../../data/table2_xi.csv"),
            TableId::SigmaAll => include_str!("../../data/table4_sigma.csv"),
            TableId::Exclusivity => include_str!("../../data/table5_edges.csv"),
            TableId::TermsA => include_str!("../../data/table6_terms.csv"),
            TableId::TermsB => include_str!("../../data/table7_terms.csv"),
            TableId::TermsC => include_str!("../../data/table8_terms.csv"),
        }
    }

    /// Source text: `$KS_FIXTURES_DIR/<file_name>` when that file exists, else the embedded copy.
    pub fn text(self) -> Result<String> {
        if let Some(dir) = std::env::var_os(FIXTURES_ENV) {
            let path = Path::new(&dir).join(self.file_name());
            if path.is_file() {
                return std::fs::read_to_string(&path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())));
            }
        }
        Ok(self.embedded().to_string())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::all()
            .into_iter()
            .find(|t| t.id() == s || t.file_name() == s)
            .ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unknown table `{s}`"),
            })
    }
}

#[derive(Clone, Debug)]
pub enum TableSource {
    Embedded(TableId),
    File { path: PathBuf, quantity: Quantity },
}

pub fn load_table(source: &TableSource) -> Result<Table> {
    match source {
        TableSource::Embedded(id) => parse_table(id.id(), &id.text()?, id.quantity()),
        TableSource::File { path, quantity } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            parse_table(&path.display().to_string(), &text, *quantity)
        }
    }
}

/// Loads and concatenates the three ξ term tables.
pub fn load_embedded_terms() -> Result<Table> {
    let mut out: Option<Table> = None;
    for id in [TableId::TermsA, TableId::TermsB, TableId::TermsC] {
        let t = load_table(&TableSource::Embedded(id))?;
        match out.as_mut() {
            None => out = Some(Table { name: "terms".into(), ..t }),
            Some(acc) => {
                acc.records.extend(t.records);
                acc.duplicates.extend(t.duplicates);
            }
        }
    }
    Ok(out.expect("three tables"))
}

/// Writes every embedded table into `dir` and returns the written paths.
pub fn dump_fixtures(dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    TableId::all()
        .into_iter()
        .map(|id| {
            let path = dir.join(id.file_name());
            std::fs::write(&path, id.embedded())?;
            Ok(path)
        })
        .collect()
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(field: &str, line: usize, what: &str) -> Result<f64> {
    let x: f64 = field
        .parse()
        .map_err(|_| parse_error(line, format!("{what} `{field}` is not a number")))?;
    if !x.is_finite() {
        return Err(parse_error(line, format!("{what} `{field}` is not finite")));
    }
    Ok(x)
}

fn parse_label(field: &str, line: usize) -> Result<u32> {
    field
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| parse_error(line, format!("bad test label `{field}`")))
}

/// Parses CSV text under the schema for `quantity`. Errors carry 1-based line numbers.
pub fn parse_table(name: &str, text: &str, quantity: Quantity) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| csv_error(&e))?.clone();
    let expected = quantity.header();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(parse_error(
            1,
            format!("expected header `{}`, found `{}`", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }

    let mut records = Vec::new();
    let mut lines_by_key: BTreeMap<(Option<StateCode>, RecordKey), Vec<usize>> = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(&e))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() != expected.len() {
            return Err(parse_error(
                line,
                format!("expected {} fields, found {}", expected.len(), row.len()),
            ));
        }
        let record = parse_row(&row, line, quantity)?;
        record.check_range()?;
        lines_by_key.entry((record.state, record.key)).or_default().push(line);
        records.push(record);
    }
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut duplicates: Vec<DuplicateKey> = lines_by_key
        .into_iter()
        .filter(|(_, lines)| lines.len() > 1)
        .map(|((state, key), lines)| {
            let probe = records
                .iter()
                .find(|r| r.state == state && r.key == key)
                .expect("key came from a record");
            DuplicateKey { key: probe.name(), lines }
        })
        .collect();
    duplicates.sort_by_key(|d| d.lines[0]);
    Ok(Table {
        name: name.to_string(),
        quantity,
        records,
        duplicates,
    })
}

fn csv_error(e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    parse_error(line, e.to_string())
}

fn parse_row(row: &csv::StringRecord, line: usize, quantity: Quantity) -> Result<MeasurementRecord> {
    let state = |field: &str| -> Result<StateCode> {
        field
            .parse()
            .map_err(|_| parse_error(line, format!("unknown state code `{field}`")))
    };
    let uncertainty = |field: &str| -> Result<Option<f64>> {
        if field.is_empty() {
            Ok(None)
        } else {
            parse_number(field, line, "uncertainty").map(Some)
        }
    };
    let (state, key, value_field, unc_field) = match quantity {
        Quantity::Sigma | Quantity::Xi => (Some(state(&row[0])?), RecordKey::Total, &row[1], &row[2]),
        Quantity::EdgeProbability => {
            let (i, j) = (parse_label(&row[0], line)?, parse_label(&row[1], line)?);
            if i == j {
                return Err(parse_error(line, format!("pair ({i}, {j}) is not a pair of distinct tests")));
            }
            (None, RecordKey::Edge { i, j }, &row[2], "")
        }
        Quantity::TermProbability => {
            let proposition: Proposition = format!("{}|{}", &row[2], &row[1])
                .parse()
                .map_err(|e: Error| parse_error(line, e.to_string()))?;
            (Some(state(&row[0])?), RecordKey::Term { proposition }, &row[3], &row[4])
        }
    };
    Ok(MeasurementRecord {
        state,
        quantity,
        key,
        value: parse_number(value_field, line, "value")?,
        uncertainty: uncertainty(unc_field)?,
        printed_value: value_field.to_string(),
        printed_uncertainty: unc_field.to_string(),
    })
}

/// Serialises records under the schema for `quantity`, using the printed text of each value.
pub fn export_table(quantity: Quantity, records: &[MeasurementRecord]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(quantity.header()).expect("in-memory write");
    for r in records {
        let state = r.state.map(|s| s.to_string()).unwrap_or_default();
        let row: Vec<String> = match r.key {
            RecordKey::Total => vec![state, r.printed_value.clone(), r.printed_uncertainty.clone()],
            RecordKey::Edge { i, j } => vec![i.to_string(), j.to_string(), r.printed_value.clone()],
            RecordKey::Term { proposition } => vec![
                state,
                proposition.context.to_string(),
                proposition.outcome_string(),
                r.printed_value.clone(),
                r.printed_uncertainty.clone(),
            ],
        };
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
