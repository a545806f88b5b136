//! Airport registry types.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::geo::GeoPoint;

/// Three-character airport identifier (IATA style), stored upper-cased.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AirportCode([u8; 3]);

impl AirportCode {
    pub fn new(code: &str) -> Result<Self> {
        let bytes = code.trim().as_bytes();
        if bytes.len() != 3 || !bytes.iter().all(u8::is_ascii_alphanumeric) {
            return Err(invalid(format!(
                "airport code must be 3 alphanumeric characters, got {code:?}"
            )));
        }
        let mut out = [0u8; 3];
        for (dst, src) in out.iter_mut().zip(bytes) {
            *dst = src.to_ascii_uppercase();
        }
        Ok(Self(out))
    }

    pub fn as_str(&self) -> &str {
        // constructed from ASCII only
        core::str::from_utf8(&self.0).unwrap_or("???")
    }
}

impl FromStr for AirportCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s)
    }
}

impl fmt::Display for AirportCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for AirportCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl Serialize for AirportCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for AirportCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        struct CodeVisitor;

        impl Visitor<'_> for CodeVisitor {
            type Value = AirportCode;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a 3-character airport code")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> core::result::Result<AirportCode, E> {
                AirportCode::new(v).map_err(E::custom)
            }
        }

        deserializer.deserialize_str(CodeVisitor)
    }
}

/// Airport size class. Busy-airport detection uses a per-hour delay count for
/// regional airports and a delay ratio for medium and large ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    #[serde(alias = "Large", alias = "LARGE")]
    Large,
    #[serde(alias = "Medium", alias = "MEDIUM")]
    Medium,
    #[serde(alias = "Regional", alias = "REGIONAL")]
    Regional,
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "large" => Ok(Category::Large),
            "medium" => Ok(Category::Medium),
            "regional" => Ok(Category::Regional),
            other => Err(invalid(format!("unknown airport category {other:?}"))),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Large => "large",
            Category::Medium => "medium",
            Category::Regional => "regional",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Airport {
    pub code: AirportCode,
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub category: Category,
    /// User-assigned urgency; higher values are served first during fine-tuning.
    #[serde(default)]
    pub priority: u32,
}

impl Airport {
    pub fn position(&self) -> GeoPoint {
        GeoPoint::new(self.lat, self.lon)
    }

    fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.lat) || !(-180.0..=180.0).contains(&self.lon) {
            return Err(invalid(format!(
                "airport {} has out-of-range coordinates ({}, {})",
                self.code, self.lat, self.lon
            )));
        }
        Ok(())
    }
}

/// A validated set of airports with unique codes. Iteration follows insertion
/// order, which is also the node order of every graph built from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    airports: Vec<Airport>,
    index: BTreeMap<AirportCode, usize>,
}

impl Registry {
    pub fn new(airports: Vec<Airport>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, airport) in airports.iter().enumerate() {
            airport.validate()?;
            if index.insert(airport.code, i).is_some() {
                return Err(Error::DuplicateAirport(airport.code));
            }
        }
        Ok(Self { airports, index })
    }

    pub fn len(&self) -> usize {
        self.airports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.airports.is_empty()
    }

    pub fn airports(&self) -> &[Airport] {
        &self.airports
    }

    pub fn iter(&self) -> impl Iterator<Item = &Airport> {
        self.airports.iter()
    }

    pub fn codes(&self) -> Vec<AirportCode> {
        self.airports.iter().map(|a| a.code).collect()
    }

    pub fn get(&self, code: AirportCode) -> Option<&Airport> {
        self.index.get(&code).map(|&i| &self.airports[i])
    }

    pub fn lookup(&self, code: AirportCode) -> Result<&Airport> {
        self.get(code).ok_or(Error::UnknownAirport(code))
    }

    pub fn index_of(&self, code: AirportCode) -> Option<usize> {
        self.index.get(&code).copied()
    }

    pub fn contains(&self, code: AirportCode) -> bool {
        self.index.contains_key(&code)
    }

    /// The first `n` airports in ascending code order.
    pub fn first_by_code(&self, n: usize) -> Result<Self> {
        let mut airports = self.airports.clone();
        airports.sort_by_key(|a| a.code);
        airports.truncate(n);
        Self::new(airports)
    }

    /// Registry with `code` removed (no-op if absent).
    pub fn without(&self, code: AirportCode) -> Self {
        let airports = self
            .airports
            .iter()
            .filter(|a| a.code != code)
            .cloned()
            .collect();
        Self::new(airports).expect("subset of a valid registry is valid")
    }
}

impl<'a> IntoIterator for &'a Registry {
    type Item = &'a Airport;
    type IntoIter = core::slice::Iter<'a, Airport>;

    fn into_iter(self) -> Self::IntoIter {
        self.airports.iter()
    }
}

#[cfg(test)]
pub(crate) fn test_airport(code: &str, lat: f64, lon: f64, category: Category) -> Airport {
    Airport {
        code: AirportCode::new(code).unwrap(),
        name: String::from(code),
        lat,
        lon,
        category,
        priority: 0,
    }
}
