use std::io::{Read, Write};

use super::{csv_error, fmt_real, parse_route, DatasetError, Result};
use crate::traffic_sim::{Trace, TrajectoryPoint};

pub const TRACE_HEADER: &str = "step,vehicle_id,x,y,speed,route_label";
const TRACE_FIELDS: usize = 6;

/// Writes the header and one row per point in trace order. Reals use 17
/// significant digits; lines end in LF.
pub fn write_trace_csv<W: Write>(trace: &Trace, dest: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(dest);
    w.write_record(TRACE_HEADER.split(',')).map_err(csv_error)?;
    for p in &trace.points {
        w.write_record([
            p.step.to_string(),
            p.vehicle_id.clone(),
            fmt_real(p.x),
            fmt_real(p.y),
            fmt_real(p.speed),
            p.route.as_u8().to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn real(field: &str, name: &'static str, line: u64) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| DatasetError::NonNumeric {
            line,
            field: name,
            value: field.to_string(),
        })
}

/// Reads a trace written by [`write_trace_csv`] (or any file with the same
/// header) and sorts it into canonical order.
pub fn read_trace_csv<R: Read>(source: R) -> Result<Trace> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(csv_error)?,
        None => {
            return Err(DatasetError::MalformedHeader {
                expected: TRACE_HEADER.into(),
                found: String::new(),
            })
        }
    };
    let found = header.iter().collect::<Vec<_>>().join(",");
    if found != TRACE_HEADER {
        return Err(DatasetError::MalformedHeader {
            expected: TRACE_HEADER.into(),
            found,
        });
    }

    let mut points = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != TRACE_FIELDS {
            return Err(DatasetError::BadRow {
                line,
                reason: format!("expected {TRACE_FIELDS} fields, found {}", rec.len()),
            });
        }
        let step = rec[0]
            .trim()
            .parse::<usize>()
            .map_err(|_| DatasetError::NonNumeric {
                line,
                field: "step",
                value: rec[0].to_string(),
            })?;
        points.push(TrajectoryPoint {
            vehicle_id: rec[1].to_string(),
            step,
            x: real(&rec[2], "x", line)?,
            y: real(&rec[3], "y", line)?,
            speed: real(&rec[4], "speed", line)?,
            route: parse_route(rec[5].trim(), line)?,
        });
    }
    Ok(Trace::from_points(points))
}
