//! Flight CSV ingest (BTS on-time performance layout by default).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use airconf_core::{AirportCode, Date, FlightRecord};
use serde::{Deserialize, Serialize};

use crate::error::IngestError;

/// Default delay threshold in minutes. A departure delay at or above it is delayed.
pub const DEFAULT_DELAY_THRESHOLD_MIN: i32 = 15;

/// Column names for each logical field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlightSchema {
    pub year: String,
    pub month: String,
    pub day: String,
    pub airline: String,
    pub origin: String,
    pub destination: String,
    pub scheduled_departure: String,
    pub departure_delay: String,
    pub cancelled: String,
    pub diverted: String,
}

impl Default for FlightSchema {
    fn default() -> Self {
        Self {
            year: "YEAR".into(),
            month: "MONTH".into(),
            day: "DAY".into(),
            airline: "AIRLINE".into(),
            origin: "ORIGIN_AIRPORT".into(),
            destination: "DESTINATION_AIRPORT".into(),
            scheduled_departure: "SCHEDULED_DEPARTURE".into(),
            departure_delay: "DEPARTURE_DELAY".into(),
            cancelled: "CANCELLED".into(),
            diverted: "DIVERTED".into(),
        }
    }
}

impl FlightSchema {
    fn columns(&self) -> [&str; 10] {
        [
            &self.year,
            &self.month,
            &self.day,
            &self.airline,
            &self.origin,
            &self.destination,
            &self.scheduled_departure,
            &self.departure_delay,
            &self.cancelled,
            &self.diverted,
        ]
    }

    fn resolve(&self, headers: &csv::StringRecord) -> Result<[usize; 10], IngestError> {
        let mut idx = [0; 10];
        for (slot, name) in idx.iter_mut().zip(self.columns()) {
            *slot = headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| IngestError::MissingColumn {
                    column: name.to_string(),
                })?;
        }
        Ok(idx)
    }
}

/// Result of a parse: kept records plus counters for what was dropped.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParseOutcome {
    pub records: Vec<FlightRecord>,
    /// Rows that could not be parsed (missing or malformed required fields).
    pub rejected: usize,
    /// Cancelled or diverted rows.
    pub filtered: usize,
}

enum Row {
    Keep(FlightRecord),
    Filtered,
    Rejected,
}

fn flag(s: &str) -> Option<bool> {
    match s.trim() {
        "0" | "0.0" => Some(false),
        "1" | "1.0" => Some(true),
        _ => None,
    }
}

/// `HHMM` as written by BTS (leading zeros optional, `2400` means midnight
/// at the end of the day and is rejected since it lies outside the day).
fn hhmm(s: &str) -> Option<u16> {
    let v: u16 = s.trim().parse().ok()?;
    let (h, m) = (v / 100, v % 100);
    (h < 24 && m < 60).then_some(h * 60 + m)
}

fn delay_minutes(s: &str) -> Option<i32> {
    let s = s.trim();
    s.parse::<i32>().ok().or_else(|| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(|v| v.round() as i32)
    })
}

fn parse_row(row: &csv::StringRecord, idx: &[usize; 10], threshold: i32) -> Row {
    let field = |i: usize| row.get(idx[i]).unwrap_or("");
    let (Some(cancelled), Some(diverted)) = (flag(field(8)), flag(field(9))) else {
        return Row::Rejected;
    };
    if cancelled || diverted {
        return Row::Filtered;
    }
    let parsed = (|| {
        let date = Date::new(
            field(0).trim().parse().ok()?,
            field(1).trim().parse().ok()?,
            field(2).trim().parse().ok()?,
        )
        .ok()?;
        let airline = field(3).trim();
        let origin: AirportCode = field(4).trim().parse().ok()?;
        let destination: AirportCode = field(5).trim().parse().ok()?;
        if airline.is_empty() || origin == destination {
            return None;
        }
        Some(FlightRecord {
            date,
            airline: airline.to_string(),
            origin,
            destination,
            scheduled_departure: hhmm(field(6))?,
            delayed: delay_minutes(field(7))? >= threshold,
        })
    })();
    parsed.map_or(Row::Rejected, Row::Keep)
}

/// Parse flight rows, keeping those for which `keep` returns true.
pub fn parse_flight_records_filtered<R: Read>(
    reader: R,
    schema: &FlightSchema,
    delay_threshold_min: i32,
    mut keep: impl FnMut(&FlightRecord) -> bool,
) -> Result<ParseOutcome, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let idx = schema.resolve(rdr.headers()?)?;
    let mut out = ParseOutcome::default();
    let mut row = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => match parse_row(&row, &idx, delay_threshold_min) {
                Row::Keep(r) => {
                    if keep(&r) {
                        out.records.push(r);
                    }
                }
                Row::Filtered => out.filtered += 1,
                Row::Rejected => out.rejected += 1,
            },
            Err(e) if matches!(e.kind(), csv::ErrorKind::Utf8 { .. }) => out.rejected += 1,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

/// Parse every operated flight.
pub fn parse_flight_records<R: Read>(
    reader: R,
    schema: &FlightSchema,
    delay_threshold_min: i32,
) -> Result<ParseOutcome, IngestError> {
    parse_flight_records_filtered(reader, schema, delay_threshold_min, |_| true)
}

pub fn read_flights(
    path: &Path,
    schema: &FlightSchema,
    delay_threshold_min: i32,
    keep: impl FnMut(&FlightRecord) -> bool,
) -> Result<ParseOutcome, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_flight_records_filtered(
        std::io::BufReader::new(file),
        schema,
        delay_threshold_min,
        keep,
    )
}

/// Copy the rows of a full BTS export whose origin is in `origins` into a
/// smaller CSV with only the schema's columns. Returns `(kept, scanned)`.
pub fn prepare_subset<R: Read, W: Write>(
    reader: R,
    writer: W,
    schema: &FlightSchema,
    origins: &std::collections::BTreeSet<AirportCode>,
) -> Result<(usize, usize), IngestError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let idx = schema.resolve(rdr.headers()?)?;
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(schema.columns())?;
    let (mut kept, mut scanned) = (0, 0);
    let mut row = csv::StringRecord::new();
    while rdr.read_record(&mut row)? {
        scanned += 1;
        let in_set = row
            .get(idx[4])
            .and_then(|o| o.trim().parse().ok())
            .is_some_and(|o| origins.contains(&o));
        if in_set {
            wtr.write_record(idx.iter().map(|&i| row.get(i).unwrap_or("")))?;
            kept += 1;
        }
    }
    wtr.flush().map_err(|e| IngestError::Csv(e.into()))?;
    Ok((kept, scanned))
}
