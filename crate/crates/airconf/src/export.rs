//! GeoJSON maps and aligned text tables.

use std::fmt::Write as _;

use airconf_core::{Configuration, Registry, WindowStats};
use geojson::{Feature, FeatureCollection, Geometry, JsonObject, Value};
use serde_json::json;

use crate::manifest::RunManifest;

fn point(lon: f64, lat: f64) -> Vec<f64> {
    vec![lon, lat]
}

/// One Point per airport (code, cluster, busy, f, d) and one LineString per
/// collaborative pair. The manifest rides along as a foreign member.
pub fn export_geojson(
    config: &Configuration,
    registry: &Registry,
    stats: &WindowStats,
    manifest: Option<&RunManifest>,
) -> FeatureCollection {
    let mut features = Vec::with_capacity(registry.len() + config.pairs.len());
    for airport in registry {
        let load = stats.get(airport.code).unwrap_or_default();
        let mut props = JsonObject::new();
        props.insert("code".into(), json!(airport.code));
        props.insert("cluster".into(), json!(config.cluster_of(airport.code)));
        props.insert("busy".into(), json!(config.busy.contains(&airport.code)));
        props.insert("f".into(), json!(load.flights));
        props.insert("d".into(), json!(load.delayed));
        features.push(Feature {
            bbox: None,
            geometry: Some(Geometry::new(Value::Point(point(airport.lon, airport.lat)))),
            id: None,
            properties: Some(props),
            foreign_members: None,
        });
    }
    for pair in &config.pairs {
        let (Some(a), Some(b)) = (registry.get(pair.busy), registry.get(pair.partner)) else {
            continue;
        };
        let mut props = JsonObject::new();
        props.insert("busy".into(), json!(pair.busy));
        props.insert("partner".into(), json!(pair.partner));
        props.insert("cluster".into(), json!(config.cluster_of(pair.busy)));
        props.insert("distance_nm".into(), json!(pair.distance_nm));
        features.push(Feature {
            bbox: None,
            geometry: Some(Geometry::new(Value::LineString(vec![
                point(a.lon, a.lat),
                point(b.lon, b.lat),
            ]))),
            id: None,
            properties: Some(props),
            foreign_members: None,
        });
    }
    let foreign_members = manifest.map(|m| {
        let mut obj = JsonObject::new();
        obj.insert(
            "manifest".into(),
            serde_json::to_value(m).expect("manifest serializes"),
        );
        obj
    });
    FeatureCollection {
        bbox: None,
        features,
        foreign_members,
    }
}

/// Right-pads every column to its widest cell.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied());
    line(
        &mut widths
            .iter()
            .map(|w| &"----------------------------------------"[..(*w).min(40)]),
    );
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

pub fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.2}%"))
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.3}"))
}

/// Human-readable summary of one window.
pub fn configuration_text(config: &Configuration, stats: &WindowStats) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "window {}  method {:?}  k {}  lambda {:.2}  rounds {}",
        config.window, config.method, config.k, config.lambda_used, config.rounds
    );
    let rows: Vec<Vec<String>> = config
        .clusters
        .iter()
        .map(|c| {
            let (f, d) = c.members.iter().fold((0, 0), |(f, d), m| {
                let l = stats.get(*m).unwrap_or_default();
                (f + l.flights, d + l.delayed)
            });
            let names: Vec<String> = c.members.iter().map(|m| m.to_string()).collect();
            vec![
                c.id.to_string(),
                names.join(" "),
                f.to_string(),
                d.to_string(),
            ]
        })
        .collect();
    out.push_str(&table(&["cluster", "members", "f", "d"], &rows));
    let join = |v: &[airconf_core::AirportCode]| {
        if v.is_empty() {
            "-".to_string()
        } else {
            v.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        }
    };
    let pairs: Vec<String> = config
        .pairs
        .iter()
        .map(|p| format!("{}-{}", p.busy, p.partner))
        .collect();
    let _ = writeln!(out, "busy: {}", join(&config.busy));
    let _ = writeln!(
        out,
        "pairs: {}",
        if pairs.is_empty() {
            "-".into()
        } else {
            pairs.join(" ")
        }
    );
    let _ = writeln!(out, "unpaired busy: {}", join(&config.unpaired_busy));
    for r in &config.rejected {
        let _ = writeln!(
            out,
            "rejected {}-{}: {} inside enclosing circle",
            r.busy, r.partner, r.blocker
        );
    }
    if let Some(m) = &config.metrics {
        let _ = writeln!(
            out,
            "S_F {} -> {} ({})  S_D {} -> {} ({})",
            num(m.baseline.s_regular),
            num(m.configured.s_regular),
            pct(m.reduction.regular_reduction_pct),
            num(m.baseline.s_delayed),
            num(m.configured.s_delayed),
            pct(m.reduction.delayed_reduction_pct),
        );
    }
    out
}
