use std::path::Path;

use airconf::ingest::{parse_flight_records, read_flights, FlightSchema};
use airconf::registry::florida;
use airconf_core::{window_stats, AirportLoad, TimeWindow};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixture_flights.csv");

fn window(span: &str) -> TimeWindow {
    TimeWindow::parse_span("2015-12-24".parse().unwrap(), span).unwrap()
}

#[test]
fn fixture_counts() {
    let out = read_flights(Path::new(FIXTURE), &FlightSchema::default(), 15, |_| true).unwrap();
    assert_eq!(out.filtered, 11);
    assert_eq!(out.rejected, 2);
    assert_eq!(out.records.len(), 479 - 11 - 2);
}

#[test]
fn noon_window_stats() {
    let registry = florida();
    let records = read_flights(Path::new(FIXTURE), &FlightSchema::default(), 15, |_| true)
        .unwrap()
        .records;
    let stats = window_stats(&records, &window("12:00-14:00"), &registry).unwrap();
    assert_eq!(stats.ignored, 6);
    assert_eq!(stats.total_flights(), 138);
    assert_eq!(
        stats.get("MCO".parse().unwrap()),
        Some(AirportLoad {
            flights: 26,
            delayed: 14
        })
    );
    // 15 minutes counts as delayed, 14 does not
    assert_eq!(
        stats.get("GNV".parse().unwrap()),
        Some(AirportLoad {
            flights: 4,
            delayed: 1
        })
    );
    assert_eq!(
        stats.get("FXE".parse().unwrap()),
        Some(AirportLoad::default())
    );
}

#[test]
fn window_edges_are_half_open() {
    let registry = florida();
    let records = read_flights(Path::new(FIXTURE), &FlightSchema::default(), 15, |_| true)
        .unwrap()
        .records;
    let tlh = |span: &str| {
        window_stats(&records, &window(span), &registry)
            .unwrap()
            .get("TLH".parse().unwrap())
            .unwrap()
    };
    assert_eq!(tlh("14:00-16:00").flights, 1);
    assert_eq!(tlh("10:00-12:00").flights, 1);
    let whole = window_stats(&records, &window("00:00-24:00"), &registry).unwrap();
    let parts: Vec<_> = ["00:00-12:00", "12:00-24:00"]
        .iter()
        .map(|s| window_stats(&records, &window(s), &registry).unwrap())
        .collect();
    for (code, load) in &whole.loads {
        let a = parts[0].loads[code];
        let b = parts[1].loads[code];
        assert_eq!(load.flights, a.flights + b.flights);
        assert_eq!(load.delayed, a.delayed + b.delayed);
    }
}

#[test]
fn reparse_is_identical() {
    let text = std::fs::read(FIXTURE).unwrap();
    let a = parse_flight_records(text.as_slice(), &FlightSchema::default(), 15).unwrap();
    let b = parse_flight_records(text.as_slice(), &FlightSchema::default(), 15).unwrap();
    assert_eq!(a, b);
}

#[test]
fn higher_threshold_never_adds_delays() {
    let text = std::fs::read(FIXTURE).unwrap();
    let loose = parse_flight_records(text.as_slice(), &FlightSchema::default(), 15).unwrap();
    let strict = parse_flight_records(text.as_slice(), &FlightSchema::default(), 60).unwrap();
    assert_eq!(loose.records.len(), strict.records.len());
    assert!(loose
        .records
        .iter()
        .zip(&strict.records)
        .all(|(l, s)| l.delayed || !s.delayed));
}
