use std::path::Path;
use std::process::{Command, Output};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixture_flights.csv");

fn airconf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_airconf"))
        .args(args)
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn configure_writes_artifacts_with_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let res = airconf(&[
        "configure",
        "--flights",
        FIXTURE,
        "--out",
        out,
        "--geojson",
        "--seed",
        "7",
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let config = json(&tmp.path().join("configuration.json"));
    assert_eq!(config["manifest"]["params"]["seed"], 7);
    assert_eq!(config["manifest"]["windows"][0], "12:00-14:00");
    assert!(config["manifest"].get("out").is_none());
    let report = json(&tmp.path().join("report.json"));
    assert_eq!(report["manifest"], config["manifest"]);
    assert!(report["report"]["reduction"]["delayed_reduction_pct"].is_number());

    let map = json(&tmp.path().join("map.geojson"));
    assert_eq!(map["type"], "FeatureCollection");
    let pairs = config["configuration"]["pairs"].as_array().unwrap().len();
    let features = map["features"].as_array().unwrap();
    assert_eq!(features.len(), 21 + pairs);
    assert_eq!(
        features
            .iter()
            .filter(|f| f["geometry"]["type"] == "LineString")
            .count(),
        pairs
    );
    assert_eq!(map["manifest"], config["manifest"]);
    let parsed: geojson::GeoJson = std::fs::read_to_string(tmp.path().join("map.geojson"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(matches!(parsed, geojson::GeoJson::FeatureCollection(_)));
}

#[test]
fn empty_flight_file_gives_undefined_reduction() {
    let tmp = tempfile::tempdir().unwrap();
    let flights = tmp.path().join("empty.csv");
    std::fs::write(&flights, "YEAR,MONTH,DAY,AIRLINE,ORIGIN_AIRPORT,DESTINATION_AIRPORT,SCHEDULED_DEPARTURE,DEPARTURE_DELAY,DIVERTED,CANCELLED\n").unwrap();
    let out = tmp.path().join("out");
    let res = airconf(&[
        "configure",
        "--flights",
        flights.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let report = json(&out.join("report.json"));
    assert!(report["report"]["reduction"]["regular_reduction_pct"].is_null());
    assert!(report["report"]["reduction"]["delayed_reduction_pct"].is_null());
    let config = json(&out.join("configuration.json"));
    assert!(config["configuration"]["pairs"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn bad_input_exits_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(
        airconf(&["configure", "--flights", "/no/such/file.csv", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        airconf(&["configure", "--registry", "/no/such/reg.json", "--out", out])
            .status
            .code(),
        Some(2)
    );
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "YEAR,MONTH\n2015,12\n").unwrap();
    let res = airconf(&[
        "configure",
        "--flights",
        bad.to_str().unwrap(),
        "--out",
        out,
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("DAY"));
    assert_eq!(
        airconf(&["configure", "--window", "14:00-12:00", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        airconf(&["configure", "--base", "1.5", "--out", out])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verbose_trace_is_json_lines() {
    let tmp = tempfile::tempdir().unwrap();
    let res = airconf(&[
        "configure",
        "--flights",
        FIXTURE,
        "--out",
        tmp.path().to_str().unwrap(),
        "--verbose",
    ]);
    assert!(res.status.success());
    let stderr = String::from_utf8(res.stderr).unwrap();
    let lines: Vec<serde_json::Value> = stderr
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(!lines.is_empty());
    assert_eq!(lines[0]["round"]["round"], 0);
    assert_eq!(lines[0]["round"]["k"], 11);
}

#[test]
fn saved_autoencoder_is_reused() {
    let tmp = tempfile::tempdir().unwrap();
    let model = tmp.path().join("model.json");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let common = [
        "configure",
        "--flights",
        FIXTURE,
        "--method",
        "ae",
        "--ae-epochs",
        "300",
    ];
    let res = airconf(
        &[
            &common[..],
            &[
                "--out",
                a.to_str().unwrap(),
                "--save-ae-model",
                model.to_str().unwrap(),
            ],
        ]
        .concat(),
    );
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let saved = json(&model);
    assert_eq!(saved["input_dim"], 21);
    assert_eq!(saved["training_log"].as_array().unwrap().len(), 300);
    let res = airconf(
        &[
            &common[..],
            &[
                "--out",
                b.to_str().unwrap(),
                "--ae-model",
                model.to_str().unwrap(),
            ],
        ]
        .concat(),
    );
    assert!(res.status.success());
    assert_eq!(
        json(&a.join("configuration.json"))["configuration"],
        json(&b.join("configuration.json"))["configuration"]
    );
    assert_eq!(
        json(&b.join("configuration.json"))["configuration"]["method"],
        "autoencoder"
    );
}

#[test]
fn sweep_summary_and_empty_window_list() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let res = airconf(&[
        "sweep",
        "--flights",
        FIXTURE,
        "--date",
        "2015-12-24",
        "--window",
        "07:00-09:00,12:00-14:00,19:00-21:00",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["rows"].as_array().unwrap().len(), 3);
    assert!(out
        .join("2015-12-24_1200-1400")
        .join("configuration.json")
        .is_file());
    let text = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(text.contains("pair") && text.contains("unpaired busy"));
    assert_eq!(
        airconf(&["sweep", "--date", "2015-12-24", "--window", ""])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn compare_on_single_airport_registry_skips_everything() {
    let tmp = tempfile::tempdir().unwrap();
    let reg = tmp.path().join("one.csv");
    std::fs::write(
        &reg,
        "code,name,lat,lon,category\nMCO,Orlando,28.43,-81.31,large\n",
    )
    .unwrap();
    let res = airconf(&[
        "compare-embeddings",
        "--registry",
        reg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let report = json(&tmp.path().join("compare.json"));
    assert!(report["timings"].as_array().unwrap().is_empty());
    assert_eq!(report["skipped"].as_array().unwrap().len(), 5);
}

#[test]
fn prepare_cuts_to_registry_origins() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("florida.csv");
    let res = airconf(&[
        "prepare",
        "--input",
        FIXTURE,
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stdout).contains("kept 473 of 479"));
}
