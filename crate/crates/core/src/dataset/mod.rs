//! Trace persistence, external trace ingestion and train/test sampling.
//!
//! This is the only place where route outcomes become class labels:
//! route 0 (straight) maps to `+1`, route 1 (off-ramp) to `−1`.

mod examples_csv;
mod fcd;
mod sampling;
mod trace_csv;

pub use examples_csv::{read_dataset_csv, write_dataset_csv, DATASET_HEADER};
pub use fcd::{read_fcd_xml, write_fcd_xml, FcdImport};
pub use sampling::{sample_examples, split, split_disjoint, SplitPools};
pub use trace_csv::{read_trace_csv, write_trace_csv, TRACE_HEADER};

use std::collections::BTreeMap;
use std::io::{Read, Write};

use thiserror::Error;

use crate::svm::{Label, LabeledExample};
use crate::traffic_sim::{Route, Trace};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed header: expected `{expected}`, found `{found}`")]
    MalformedHeader { expected: String, found: String },
    #[error("bad row at line {line}: {reason}")]
    BadRow { line: u64, reason: String },
    #[error("line {line}: field `{field}` is not a valid number: `{value}`")]
    NonNumeric {
        line: u64,
        field: &'static str,
        value: String,
    },
    #[error("XML syntax error at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("<{element}> at byte {offset} is missing attribute `{attribute}`")]
    MissingAttribute {
        element: &'static str,
        attribute: &'static str,
        offset: u64,
    },
    #[error("duplicate vehicle id `{0}` in label table")]
    DuplicateLabel(String),
    #[error("need {needed} distinct vehicles, trace has {available}")]
    InsufficientVehicles { needed: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, DatasetError>;

pub fn route_to_label(route: Route) -> Label {
    match route {
        Route::Straight => Label::Positive,
        Route::Ramp => Label::Negative,
    }
}

pub fn label_to_route(label: Label) -> Route {
    match label {
        Label::Positive => Route::Straight,
        Label::Negative => Route::Ramp,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Generated,
    Imported,
}

/// Labeled position samples, one per vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub examples: Vec<LabeledExample>,
    /// Source vehicle of each example, parallel to `examples`.
    pub vehicle_ids: Vec<String>,
    pub provenance: Provenance,
    pub seed: u64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.examples.iter().filter(|e| e.label == label).count()
    }
}

/// Route outcome per vehicle id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabelTable {
    routes: BTreeMap<String, Route>,
}

pub const LABEL_HEADER: &str = "vehicle_id,route_label";

impl LabelTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, route: Route) -> Result<()> {
        let id = id.into();
        if self.routes.contains_key(&id) {
            return Err(DatasetError::DuplicateLabel(id));
        }
        self.routes.insert(id, route);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<Route> {
        self.routes.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    /// Labels of every vehicle in `trace`.
    pub fn from_trace(trace: &Trace) -> Self {
        let mut routes = BTreeMap::new();
        for p in &trace.points {
            routes.entry(p.vehicle_id.clone()).or_insert(p.route);
        }
        Self { routes }
    }

    /// Reads the sidecar CSV `vehicle_id,route_label`.
    pub fn read_csv<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(source);
        let mut records = reader.records();
        match records.next() {
            Some(rec) => {
                let rec = rec.map_err(csv_error)?;
                let found = rec.iter().collect::<Vec<_>>().join(",");
                if found != LABEL_HEADER {
                    return Err(DatasetError::MalformedHeader {
                        expected: LABEL_HEADER.into(),
                        found,
                    });
                }
            }
            None => {
                return Err(DatasetError::MalformedHeader {
                    expected: LABEL_HEADER.into(),
                    found: String::new(),
                })
            }
        }
        let mut table = LabelTable::new();
        for rec in records {
            let rec = rec.map_err(csv_error)?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != 2 {
                return Err(DatasetError::BadRow {
                    line,
                    reason: format!("expected 2 fields, found {}", rec.len()),
                });
            }
            let route = parse_route(&rec[1], line)?;
            table.insert(&rec[0], route)?;
        }
        Ok(table)
    }

    pub fn write_csv<W: Write>(&self, mut dest: W) -> Result<()> {
        writeln!(dest, "{LABEL_HEADER}")?;
        for (id, route) in &self.routes {
            writeln!(dest, "{id},{}", route.as_u8())?;
        }
        dest.flush()?;
        Ok(())
    }
}

pub(crate) fn parse_route(field: &str, line: u64) -> Result<Route> {
    field
        .parse::<u8>()
        .ok()
        .and_then(Route::from_u8)
        .ok_or_else(|| DatasetError::BadRow {
            line,
            reason: format!("route_label must be 0 or 1, found `{field}`"),
        })
}

pub(crate) fn csv_error(e: csv::Error) -> DatasetError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => DatasetError::Io(io),
        other => DatasetError::BadRow {
            line,
            reason: format!("{other:?}"),
        },
    }
}

pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_mapping_is_canonical() {
        assert_eq!(route_to_label(Route::Straight), Label::Positive);
        assert_eq!(route_to_label(Route::Ramp), Label::Negative);
        for r in [Route::Straight, Route::Ramp] {
            assert_eq!(label_to_route(route_to_label(r)), r);
        }
    }

    #[test]
    fn label_table_csv_round_trip() {
        let mut t = LabelTable::new();
        t.insert("a", Route::Ramp).unwrap();
        t.insert("b", Route::Straight).unwrap();
        assert!(matches!(t.insert("a", Route::Straight), Err(DatasetError::DuplicateLabel(_))));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "vehicle_id,route_label\na,1\nb,0\n");
        assert_eq!(LabelTable::read_csv(&buf[..]).unwrap(), t);
    }

    #[test]
    fn label_table_rejects_duplicates_and_bad_values() {
        let dup = "vehicle_id,route_label\na,1\na,0\n";
        assert!(matches!(LabelTable::read_csv(dup.as_bytes()), Err(DatasetError::DuplicateLabel(_))));
        let bad = "vehicle_id,route_label\na,2\n";
        assert!(matches!(
            LabelTable::read_csv(bad.as_bytes()),
            Err(DatasetError::BadRow { line: 2, .. })
        ));
        assert!(matches!(
            LabelTable::read_csv("id,label\n".as_bytes()),
            Err(DatasetError::MalformedHeader { .. })
        ));
    }
}
