//! Subset of SUMO's floating-car-data export:
//!
//! ```xml
//! <fcd-export>
//!   <timestep time="0.00">
//!     <vehicle id="veh0" x="12.5" y="-0.5" speed="2.0" .../>
//!   </timestep>
//! </fcd-export>
//! ```
//!
//! Other elements and attributes are ignored. FCD carries no route outcome, so
//! labels come from a [`LabelTable`].

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{fmt_real, DatasetError, LabelTable, Result};
use crate::traffic_sim::{Trace, TrajectoryPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct FcdImport {
    pub trace: Trace,
    /// Vehicle observations dropped because the id had no label.
    pub skipped_points: usize,
    pub skipped_vehicles: usize,
}

fn attr(
    e: &BytesStart<'_>,
    element: &'static str,
    name: &'static str,
    offset: u64,
) -> Result<String> {
    let found = e.try_get_attribute(name).map_err(|err| DatasetError::Xml {
        offset,
        message: err.to_string(),
    })?;
    let a = found.ok_or(DatasetError::MissingAttribute {
        element,
        attribute: name,
        offset,
    })?;
    let v = a.unescape_value().map_err(|err| DatasetError::Xml {
        offset,
        message: err.to_string(),
    })?;
    Ok(v.into_owned())
}

fn real_attr(e: &BytesStart<'_>, name: &'static str, offset: u64) -> Result<f64> {
    let raw = attr(e, "vehicle", name, offset)?;
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| DatasetError::Xml {
            offset,
            message: format!("attribute `{name}` is not a number: `{raw}`"),
        })
}

/// Parses an FCD document. `time` values become steps `0, 1, 2, ...` in order
/// of first appearance.
pub fn read_fcd_xml<R: BufRead>(source: R, labels: &LabelTable) -> Result<FcdImport> {
    let mut reader = Reader::from_reader(source);
    reader.config_mut().trim_text(true);
    let mut buf = Vec::new();
    let mut steps: HashMap<String, usize> = HashMap::new();
    let mut current: Option<usize> = None;
    let mut points = Vec::new();
    let mut skipped_points = 0usize;
    let mut skipped_ids = BTreeSet::new();

    loop {
        let offset = reader.buffer_position();
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|err| DatasetError::Xml {
                offset: reader.error_position(),
                message: err.to_string(),
            })?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                match e.name().as_ref() {
                    b"timestep" => {
                        let time = attr(e, "timestep", "time", offset)?;
                        let next = steps.len();
                        let step = *steps.entry(time).or_insert(next);
                        current = if is_empty { None } else { Some(step) };
                    }
                    b"vehicle" => {
                        let Some(step) = current else { continue };
                        let id = attr(e, "vehicle", "id", offset)?;
                        let x = real_attr(e, "x", offset)?;
                        let y = real_attr(e, "y", offset)?;
                        let speed = real_attr(e, "speed", offset)?;
                        match labels.get(&id) {
                            Some(route) => points.push(TrajectoryPoint {
                                vehicle_id: id,
                                step,
                                x,
                                y,
                                speed,
                                route,
                            }),
                            None => {
                                skipped_points += 1;
                                skipped_ids.insert(id);
                            }
                        }
                    }
                    _ => {}
                }
            }
            Event::End(ref e) if e.name().as_ref() == b"timestep" => current = None,
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if skipped_points > 0 {
        log::warn!(
            "skipped {skipped_points} observations of {} unlabeled vehicles",
            skipped_ids.len()
        );
    }
    Ok(FcdImport {
        trace: Trace::from_points(points),
        skipped_points,
        skipped_vehicles: skipped_ids.len(),
    })
}

/// Exports a trace in the FCD shape accepted by [`read_fcd_xml`]; step `s`
/// is written as `time="s.00"`.
pub fn write_fcd_xml<W: Write>(trace: &Trace, mut dest: W) -> Result<()> {
    writeln!(dest, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(dest, "<fcd-export>")?;
    let mut i = 0;
    let points = &trace.points;
    while i < points.len() {
        let step = points[i].step;
        writeln!(dest, r#"    <timestep time="{step}.00">"#)?;
        while i < points.len() && points[i].step == step {
            let p = &points[i];
            writeln!(
                dest,
                r#"        <vehicle id="{}" x="{}" y="{}" angle="90.00" type="DEFAULT_VEHTYPE" speed="{}" pos="0.00" lane="e0_0" slope="0.00"/>"#,
                escape(p.vehicle_id.as_str()),
                fmt_real(p.x),
                fmt_real(p.y),
                fmt_real(p.speed),
            )?;
            i += 1;
        }
        writeln!(dest, "    </timestep>")?;
    }
    writeln!(dest, "</fcd-export>")?;
    dest.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic_sim::{generate_trace, Route, ScenarioConfig};

    fn labels(pairs: &[(&str, Route)]) -> LabelTable {
        let mut t = LabelTable::new();
        for (id, r) in pairs {
            t.insert(*id, *r).unwrap();
        }
        t
    }

    #[test]
    fn no_timesteps_gives_empty_trace() {
        let doc = r#"<?xml version="1.0"?><fcd-export></fcd-export>"#;
        let out = read_fcd_xml(doc.as_bytes(), &LabelTable::new()).unwrap();
        assert!(out.trace.is_empty());
        assert_eq!(out.skipped_points, 0);
    }

    #[test]
    fn single_labeled_vehicle() {
        let doc = r#"<fcd-export><timestep time="3.50"><vehicle id="car" x="1.0" y="-2.0" speed="4.5" angle="90"/></timestep></fcd-export>"#;
        let out = read_fcd_xml(doc.as_bytes(), &labels(&[("car", Route::Ramp)])).unwrap();
        assert_eq!(
            out.trace.points,
            vec![TrajectoryPoint {
                vehicle_id: "car".into(),
                step: 0,
                x: 1.0,
                y: -2.0,
                speed: 4.5,
                route: Route::Ramp,
            }]
        );
    }

    #[test]
    fn unlabeled_vehicles_are_counted() {
        let doc = r#"<fcd-export>
            <timestep time="0"><vehicle id="a" x="0" y="0" speed="1"/><vehicle id="b" x="0" y="0" speed="1"/></timestep>
            <timestep time="1"><vehicle id="b" x="1" y="0" speed="1"/></timestep>
        </fcd-export>"#;
        let out = read_fcd_xml(doc.as_bytes(), &labels(&[("a", Route::Straight)])).unwrap();
        assert_eq!(out.trace.points.len(), 1);
        assert_eq!(out.skipped_points, 2);
        assert_eq!(out.skipped_vehicles, 1);
    }

    #[test]
    fn times_are_renumbered_by_appearance() {
        let doc = r#"<fcd-export>
            <timestep time="10.0"><vehicle id="a" x="0" y="0" speed="1"/></timestep>
            <timestep time="10.5"><vehicle id="a" x="1" y="0" speed="1"/></timestep>
        </fcd-export>"#;
        let out = read_fcd_xml(doc.as_bytes(), &labels(&[("a", Route::Straight)])).unwrap();
        let steps: Vec<_> = out.trace.points.iter().map(|p| p.step).collect();
        assert_eq!(steps, vec![0, 1]);
    }

    #[test]
    fn missing_attribute_is_reported() {
        let doc = r#"<fcd-export><timestep time="0"><vehicle id="a" x="0" speed="1"/></timestep></fcd-export>"#;
        match read_fcd_xml(doc.as_bytes(), &labels(&[("a", Route::Straight)])) {
            Err(DatasetError::MissingAttribute { element, attribute, offset }) => {
                assert_eq!((element, attribute), ("vehicle", "y"));
                assert_eq!(offset, 31);
            }
            other => panic!("unexpected {other:?}"),
        }
        let doc = r#"<fcd-export><timestep><vehicle id="a" x="0" y="0" speed="1"/></timestep></fcd-export>"#;
        assert!(matches!(
            read_fcd_xml(doc.as_bytes(), &LabelTable::new()),
            Err(DatasetError::MissingAttribute { element: "timestep", attribute: "time", .. })
        ));
    }

    #[test]
    fn syntax_error_carries_offset() {
        let doc = r#"<fcd-export><timestep time="0"></vehicle></fcd-export>"#;
        match read_fcd_xml(doc.as_bytes(), &LabelTable::new()) {
            Err(DatasetError::Xml { offset, .. }) => assert!(offset > 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn generated_trace_round_trips() {
        let trace = generate_trace(&ScenarioConfig {
            num_vehicles: 15,
            num_steps: 12,
            ..Default::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_fcd_xml(&trace, &mut buf).unwrap();
        let out = read_fcd_xml(&buf[..], &LabelTable::from_trace(&trace)).unwrap();
        assert_eq!(out.trace, trace);
        assert_eq!(out.skipped_points, 0);
    }
}
