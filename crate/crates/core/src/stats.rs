//! Flight records and per-airport workload counts for a time window.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::airport::{AirportCode, Registry};
use crate::error::{invalid, Error, Result};

/// Calendar date. Serialized as `YYYY-MM-DD`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Date {
    pub year: i32,
    pub month: u8,
    pub day: u8,
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Result<Self> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return Err(invalid(format!(
                "invalid calendar date {year:04}-{month:02}-{day:02}"
            )));
        }
        Ok(Self { year, month, day })
    }
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        _ if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 => 29,
        _ => 28,
    }
}

impl FromStr for Date {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().splitn(3, '-');
        let mut next = || {
            parts
                .next()
                .ok_or_else(|| invalid(format!("expected YYYY-MM-DD, got {s:?}")))
        };
        let year = next()?;
        let month = next()?;
        let day = next()?;
        let bad = |_| invalid(format!("expected YYYY-MM-DD, got {s:?}"));
        Date::new(
            year.parse().map_err(bad)?,
            month.parse().map_err(bad)?,
            day.parse().map_err(bad)?,
        )
    }
}

impl TryFrom<String> for Date {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Date> for String {
    fn from(d: Date) -> String {
        format!("{d}")
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

impl fmt::Debug for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub const MINUTES_PER_DAY: u16 = 1440;

/// Format minutes-of-day as `HH:MM`.
pub fn format_hhmm(minutes: u16) -> String {
    format!("{:02}:{:02}", minutes / 60, minutes % 60)
}

/// Parse `HH:MM` into minutes-of-day. `24:00` is accepted as the end of day.
pub fn parse_hhmm(s: &str) -> Result<u16> {
    let (h, m) = s
        .trim()
        .split_once(':')
        .ok_or_else(|| invalid(format!("expected HH:MM, got {s:?}")))?;
    let bad = |_| invalid(format!("expected HH:MM, got {s:?}"));
    let h: u16 = h.parse().map_err(bad)?;
    let m: u16 = m.parse().map_err(bad)?;
    if m >= 60 || h * 60 + m > MINUTES_PER_DAY {
        return Err(invalid(format!("time of day out of range: {s:?}")));
    }
    Ok(h * 60 + m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlightRecord {
    pub date: Date,
    pub airline: String,
    pub origin: AirportCode,
    pub destination: AirportCode,
    /// Scheduled departure, minutes after local midnight.
    pub scheduled_departure: u16,
    pub delayed: bool,
}

/// Half-open interval `[start, end)` of minutes on one date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimeWindow {
    pub date: Date,
    pub start: u16,
    pub end: u16,
}

impl TimeWindow {
    pub const DEFAULT_MINUTES: u16 = 120;

    pub fn new(date: Date, start: u16, end: u16) -> Result<Self> {
        if start >= end || end > MINUTES_PER_DAY {
            return Err(invalid(format!(
                "time window must satisfy start < end <= 24:00, got {}-{}",
                format_hhmm(start),
                format_hhmm(end)
            )));
        }
        Ok(Self { date, start, end })
    }

    /// Default two-hour window beginning at `start`.
    pub fn starting_at(date: Date, start: u16) -> Result<Self> {
        Self::new(date, start, start.saturating_add(Self::DEFAULT_MINUTES))
    }

    /// Parse a span such as `12:00-14:00`.
    pub fn parse_span(date: Date, span: &str) -> Result<Self> {
        let (a, b) = span
            .split_once('-')
            .ok_or_else(|| invalid(format!("expected HH:MM-HH:MM, got {span:?}")))?;
        Self::new(date, parse_hhmm(a)?, parse_hhmm(b)?)
    }

    pub fn hours(&self) -> f64 {
        f64::from(self.end - self.start) / 60.0
    }

    pub fn contains(&self, date: Date, minute: u16) -> bool {
        date == self.date && self.start <= minute && minute < self.end
    }

    /// `HH:MM-HH:MM`
    pub fn span_label(&self) -> String {
        format!("{}-{}", format_hhmm(self.start), format_hhmm(self.end))
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.date, self.span_label())
    }
}

/// Scheduled (`flights`, f) and delayed (`delayed`, d) departures of one airport.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AirportLoad {
    pub flights: u32,
    pub delayed: u32,
}

impl AirportLoad {
    pub fn new(flights: u32, delayed: u32) -> Result<Self> {
        if delayed > flights {
            return Err(invalid(format!(
                "delayed count {delayed} exceeds flight count {flights}"
            )));
        }
        Ok(Self { flights, delayed })
    }

    /// d / f, with 0/0 taken as 0.
    pub fn delay_ratio(&self) -> f64 {
        if self.flights == 0 {
            0.0
        } else {
            f64::from(self.delayed) / f64::from(self.flights)
        }
    }

    pub fn on_time(&self) -> u32 {
        self.flights - self.delayed
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub loads: BTreeMap<AirportCode, AirportLoad>,
    /// Records in the window whose origin is not in the registry.
    pub ignored: usize,
}

impl WindowStats {
    pub fn from_loads(loads: impl IntoIterator<Item = (AirportCode, AirportLoad)>) -> Self {
        Self {
            loads: loads.into_iter().collect(),
            ignored: 0,
        }
    }

    pub fn get(&self, code: AirportCode) -> Option<AirportLoad> {
        self.loads.get(&code).copied()
    }

    pub fn load(&self, code: AirportCode) -> Result<AirportLoad> {
        self.get(code).ok_or(Error::MissingStats(code))
    }

    pub fn total_flights(&self) -> u64 {
        self.loads.values().map(|l| u64::from(l.flights)).sum()
    }

    /// Stable digest of the per-airport counts, hex encoded.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (code, load) in &self.loads {
            hasher.update(code.as_str().as_bytes());
            hasher.update(load.flights.to_le_bytes());
            hasher.update(load.delayed.to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut out = String::with_capacity(16);
        for byte in &digest[..8] {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

/// Count departures and delayed departures per registry airport inside `window`.
///
/// Records from airports outside the registry are tallied in
/// [`WindowStats::ignored`]; every registry airport is present in the result.
pub fn window_stats<'a>(
    records: impl IntoIterator<Item = &'a FlightRecord>,
    window: &TimeWindow,
    registry: &Registry,
) -> Result<WindowStats> {
    if registry.is_empty() {
        return Err(invalid("airport registry is empty"));
    }
    let mut stats =
        WindowStats::from_loads(registry.iter().map(|a| (a.code, AirportLoad::default())));
    for record in records {
        if !window.contains(record.date, record.scheduled_departure) {
            continue;
        }
        match stats.loads.get_mut(&record.origin) {
            Some(load) => {
                load.flights += 1;
                if record.delayed {
                    load.delayed += 1;
                }
            }
            None => stats.ignored += 1,
        }
    }
    Ok(stats)
}
