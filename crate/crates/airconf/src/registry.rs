//! Airport registry files.
//!
//! JSON registries are an array of airport objects; CSV registries have a
//! header row with `code,name,lat,lon,category[,priority]`.

use std::fs;
use std::path::Path;

use airconf_core::{Airport, AirportCode, Category, Registry};
use serde::Deserialize;

use crate::error::IngestError;

const FLORIDA_JSON: &str = include_str!("../data/florida_airports.json");

/// The bundled 21-airport Florida registry.
pub fn florida() -> Registry {
    parse_json(FLORIDA_JSON).expect("bundled registry is valid")
}

pub fn parse_json(text: &str) -> Result<Registry, IngestError> {
    let airports: Vec<Airport> =
        serde_json::from_str(text).map_err(|e| IngestError::Registry(e.to_string()))?;
    Registry::new(airports).map_err(|e| IngestError::Registry(e.to_string()))
}

#[derive(Deserialize)]
struct CsvAirport {
    code: AirportCode,
    name: String,
    lat: f64,
    lon: f64,
    category: Category,
    // empty cells read as None
    #[serde(default)]
    priority: Option<u32>,
}

pub fn parse_csv(reader: impl std::io::Read) -> Result<Registry, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let airports = rdr
        .deserialize()
        .map(|row| {
            row.map(|a: CsvAirport| Airport {
                code: a.code,
                name: a.name,
                lat: a.lat,
                lon: a.lon,
                category: a.category,
                priority: a.priority.unwrap_or(0),
            })
        })
        .collect::<Result<Vec<Airport>, _>>()?;
    Registry::new(airports).map_err(|e| IngestError::Registry(e.to_string()))
}

/// Load a registry by extension (`.json`, otherwise CSV). `None` selects the
/// bundled Florida registry.
pub fn load(path: Option<&Path>) -> Result<Registry, IngestError> {
    let Some(path) = path else {
        return Ok(florida());
    };
    let io = |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    };
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        parse_json(&fs::read_to_string(path).map_err(io)?)
    } else {
        parse_csv(fs::File::open(path).map_err(io)?)
    }
}
