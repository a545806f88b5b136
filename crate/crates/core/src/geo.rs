//! Spherical great-circle geometry and the initial airport adjacency graph.
//!
//! Every airport is linked to its nearest neighbour in each azimuth sector
//! around it; the directed picks are then symmetrized.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::airport::{AirportCode, Registry};
use crate::error::{invalid, Error, Result};

/// Mean earth radius in nautical miles.
pub const EARTH_RADIUS_NM: f64 = 3440.065;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub const fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }
}

/// Haversine distance on a sphere of radius [`EARTH_RADIUS_NM`].
pub fn great_circle_nm(a: GeoPoint, b: GeoPoint) -> f64 {
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.lon - a.lon).to_radians();
    let s_lat = libm::sin(dlat / 2.0);
    let s_lon = libm::sin(dlon / 2.0);
    let h = s_lat * s_lat + libm::cos(lat1) * libm::cos(lat2) * s_lon * s_lon;
    2.0 * EARTH_RADIUS_NM * libm::asin(libm::sqrt(h.clamp(0.0, 1.0)))
}

/// Initial great-circle bearing from `a` towards `b`, degrees in `[0, 360)`,
/// 0 = north, 90 = east.
pub fn initial_bearing_deg(a: GeoPoint, b: GeoPoint) -> Result<f64> {
    if a == b {
        return Err(Error::UndefinedBearing);
    }
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let dlon = (b.lon - a.lon).to_radians();
    let y = libm::sin(dlon) * libm::cos(lat2);
    let x = libm::cos(lat1) * libm::sin(lat2) - libm::sin(lat1) * libm::cos(lat2) * libm::cos(dlon);
    Ok(normalize_deg(libm::atan2(y, x).to_degrees()))
}

fn normalize_deg(deg: f64) -> f64 {
    let r = deg % 360.0;
    let r = if r < 0.0 { r + 360.0 } else { r };
    // -0.0 and values that round up to 360.0
    if r >= 360.0 {
        0.0
    } else {
        r + 0.0
    }
}

/// Great-circle midpoint of `a` and `b`.
pub fn midpoint(a: GeoPoint, b: GeoPoint) -> GeoPoint {
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let lon1 = a.lon.to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let bx = libm::cos(lat2) * libm::cos(dlon);
    let by = libm::cos(lat2) * libm::sin(dlon);
    let lat = libm::atan2(
        libm::sin(lat1) + libm::sin(lat2),
        libm::sqrt((libm::cos(lat1) + bx) * (libm::cos(lat1) + bx) + by * by),
    );
    let lon = lon1 + libm::atan2(by, libm::cos(lat1) + bx);
    let mut lon_deg = lon.to_degrees();
    if lon_deg > 180.0 {
        lon_deg -= 360.0;
    } else if lon_deg < -180.0 {
        lon_deg += 360.0;
    }
    GeoPoint::new(lat.to_degrees(), lon_deg)
}

/// Parameters for [`build_iag`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IagParams {
    /// Angular width of each sector. The circle is split into
    /// `ceil(360 / width)` equal sectors.
    pub azimuth_width_deg: f64,
    /// Neighbours farther than this are never linked.
    pub max_range_nm: f64,
    /// Bearing at which the first sector starts; 0 anchors sectors at true north.
    pub sector_offset_deg: f64,
}

impl Default for IagParams {
    fn default() -> Self {
        Self {
            azimuth_width_deg: 120.0,
            max_range_nm: 200.0,
            sector_offset_deg: 0.0,
        }
    }
}

impl IagParams {
    pub fn sector_count(&self) -> usize {
        libm::ceil(360.0 / self.azimuth_width_deg) as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.azimuth_width_deg > 0.0 && self.azimuth_width_deg <= 360.0) {
            return Err(invalid(format!(
                "azimuth width must be in (0, 360], got {}",
                self.azimuth_width_deg
            )));
        }
        if !(self.max_range_nm > 0.0) {
            return Err(invalid(format!(
                "max range must be positive, got {}",
                self.max_range_nm
            )));
        }
        if !self.sector_offset_deg.is_finite() {
            return Err(invalid("sector offset must be finite"));
        }
        Ok(())
    }

    fn sector_of(&self, bearing: f64) -> usize {
        let count = self.sector_count();
        let width = 360.0 / count as f64;
        let rel = normalize_deg(bearing - self.sector_offset_deg);
        ((rel / width) as usize).min(count - 1)
    }
}

/// Undirected graph over airports. Edges are stored as index pairs `(i, j)`
/// with `i < j` into `nodes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyGraph {
    pub nodes: Vec<AirportCode>,
    pub positions: Vec<GeoPoint>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl AdjacencyGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, code: AirportCode) -> Option<usize> {
        self.nodes.iter().position(|&c| c == code)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Neighbour codes of `code`, sorted.
    pub fn neighbor_codes(&self, code: AirportCode) -> Vec<AirportCode> {
        let Some(i) = self.index_of(code) else {
            return Vec::new();
        };
        let mut out: Vec<_> = self
            .neighbors(i)
            .into_iter()
            .map(|j| self.nodes[j])
            .collect();
        out.sort();
        out
    }

    pub fn edge_codes(&self) -> BTreeSet<(AirportCode, AirportCode)> {
        self.edges
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (self.nodes[i], self.nodes[j]);
                (a.min(b), a.max(b))
            })
            .collect()
    }

    pub fn distance_nm(&self, i: usize, j: usize) -> f64 {
        great_circle_nm(self.positions[i], self.positions[j])
    }

    /// Whether the members (node indices) form a connected subgraph using
    /// only edges between members. Empty and singleton sets are connected.
    pub fn is_connected_subset(&self, members: &[usize]) -> bool {
        let Some(&first) = members.first() else {
            return true;
        };
        let mut seen = vec![first];
        let mut stack = vec![first];
        while let Some(u) = stack.pop() {
            for &v in members {
                if !seen.contains(&v) && self.has_edge(u, v) {
                    seen.push(v);
                    stack.push(v);
                }
            }
        }
        seen.len() == members.len()
    }
}

/// Directed sector picks: for each node, the indices of the nearest airport in
/// every non-empty sector (at most `params.sector_count()` per node).
///
/// Distance ties are broken by airport code so the result does not depend on
/// registry order.
pub fn sector_neighbors(registry: &Registry, params: &IagParams) -> Result<Vec<Vec<usize>>> {
    params.validate()?;
    let airports = registry.airports();
    let sectors = params.sector_count();
    let mut picks = Vec::with_capacity(airports.len());
    for (i, from) in airports.iter().enumerate() {
        let mut best: Vec<Option<(f64, AirportCode, usize)>> = vec![None; sectors];
        for (j, to) in airports.iter().enumerate() {
            if i == j {
                continue;
            }
            let (p, q) = (from.position(), to.position());
            let dist = great_circle_nm(p, q);
            if dist > params.max_range_nm {
                continue;
            }
            // co-located airports have no bearing; file them under the first sector
            let sector = initial_bearing_deg(p, q)
                .map(|b| params.sector_of(b))
                .unwrap_or(0);
            let slot = &mut best[sector];
            let better = match slot {
                None => true,
                Some((d, c, _)) => dist < *d || (dist == *d && to.code < *c),
            };
            if better {
                *slot = Some((dist, to.code, j));
            }
        }
        picks.push(best.into_iter().flatten().map(|(_, _, j)| j).collect());
    }
    Ok(picks)
}

/// Build the initial airport adjacency graph: an undirected edge joins two
/// airports when either one is the other's nearest neighbour in some sector.
pub fn build_iag(registry: &Registry, params: &IagParams) -> Result<AdjacencyGraph> {
    if registry.is_empty() {
        return Err(invalid(
            "cannot build an adjacency graph from an empty registry",
        ));
    }
    let picks = sector_neighbors(registry, params)?;
    let mut edges = BTreeSet::new();
    for (i, targets) in picks.iter().enumerate() {
        for &j in targets {
            edges.insert((i.min(j), i.max(j)));
        }
    }
    Ok(AdjacencyGraph {
        nodes: registry.codes(),
        positions: registry.iter().map(|a| a.position()).collect(),
        edges,
    })
}
