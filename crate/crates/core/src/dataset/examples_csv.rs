use std::io::{Read, Write};

use super::{csv_error, fmt_real, Dataset, DatasetError, Provenance, Result};
use crate::svm::{Label, LabeledExample};

/// Two-feature labeled examples; `label` is `+1` or `-1`.
pub const DATASET_HEADER: &str = "vehicle_id,x,y,label";

pub fn write_dataset_csv<W: Write>(dataset: &Dataset, dest: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(dest);
    w.write_record(DATASET_HEADER.split(',')).map_err(csv_error)?;
    for (e, id) in dataset.examples.iter().zip(&dataset.vehicle_ids) {
        w.write_record([
            id.clone(),
            fmt_real(e.features[0]),
            fmt_real(e.features[1]),
            e.label.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset_csv<R: Read>(source: R) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut records = reader.records();
    let found = match records.next() {
        Some(rec) => rec.map_err(csv_error)?.iter().collect::<Vec<_>>().join(","),
        None => String::new(),
    };
    if found != DATASET_HEADER {
        return Err(DatasetError::MalformedHeader {
            expected: DATASET_HEADER.into(),
            found,
        });
    }
    let mut examples = Vec::new();
    let mut vehicle_ids = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 4 {
            return Err(DatasetError::BadRow {
                line,
                reason: format!("expected 4 fields, found {}", rec.len()),
            });
        }
        let mut features = Vec::with_capacity(2);
        for (idx, name) in [(1, "x"), (2, "y")] {
            let v = rec[idx]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DatasetError::NonNumeric {
                    line,
                    field: name,
                    value: rec[idx].to_string(),
                })?;
            features.push(v);
        }
        let label = rec[3]
            .trim()
            .parse::<i64>()
            .ok()
            .and_then(Label::from_sign)
            .ok_or_else(|| DatasetError::BadRow {
                line,
                reason: format!("label must be +1 or -1, found `{}`", &rec[3]),
            })?;
        vehicle_ids.push(rec[0].to_string());
        examples.push(LabeledExample::new(features, label));
    }
    Ok(Dataset {
        examples,
        vehicle_ids,
        provenance: Provenance::Imported,
        seed: 0,
    })
}
