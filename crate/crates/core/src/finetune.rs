//! Post-clustering rebalancing: busy airports are paired with a nearby,
//! less loaded assistant and the two are split off into their own cluster.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::airport::{Airport, AirportCode, Category, Registry};
use crate::cluster::Clustering;
use crate::embed::EmbeddingMethod;
use crate::error::{invalid, Result};
use crate::geo::{great_circle_nm, midpoint};
use crate::metrics::WorkloadReport;
use crate::stats::{AirportLoad, TimeWindow, WindowStats};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusyThresholds {
    /// Regional airports are busy above this many delayed departures per hour.
    pub regional_delayed_per_hour: f64,
    /// Medium and large airports are busy at or above this delay ratio.
    pub large_medium_delay_ratio: f64,
    pub pairing_radius_nm: f64,
}

impl Default for BusyThresholds {
    fn default() -> Self {
        Self {
            regional_delayed_per_hour: 2.0,
            large_medium_delay_ratio: 0.30,
            pairing_radius_nm: 100.0,
        }
    }
}

impl BusyThresholds {
    fn validate(&self) -> Result<()> {
        if self.regional_delayed_per_hour > 0.0
            && self.large_medium_delay_ratio > 0.0
            && self.pairing_radius_nm > 0.0
        {
            Ok(())
        } else {
            Err(invalid("busy thresholds must be positive"))
        }
    }
}

// absorbs representation error in ratio comparisons such as 6/20 vs 0.30
const RATIO_EPS: f64 = 1e-12;

pub fn detect_busy(
    airport: &Airport,
    load: AirportLoad,
    window: &TimeWindow,
    th: &BusyThresholds,
) -> bool {
    match airport.category {
        Category::Regional => {
            f64::from(load.delayed) / window.hours() > th.regional_delayed_per_hour
        }
        Category::Medium | Category::Large => {
            load.flights > 0 && load.delay_ratio() >= th.large_medium_delay_ratio - RATIO_EPS
        }
    }
}

/// Busy airports of the registry, in registry order.
pub fn busy_airports(
    registry: &Registry,
    stats: &WindowStats,
    window: &TimeWindow,
    th: &BusyThresholds,
) -> Result<Vec<AirportCode>> {
    let mut out = Vec::new();
    for airport in registry {
        if detect_busy(airport, stats.load(airport.code)?, window, th) {
            out.push(airport.code);
        }
    }
    Ok(out)
}

/// Order busy airports by descending (priority, delayed, delay ratio,
/// flights), then ascending code.
pub fn rank_busy(
    busy: &[AirportCode],
    stats: &WindowStats,
    registry: &Registry,
) -> Result<Vec<AirportCode>> {
    let mut keyed = Vec::with_capacity(busy.len());
    for &code in busy {
        let priority = registry.lookup(code)?.priority;
        keyed.push((priority, stats.load(code)?, code));
    }
    keyed.sort_by(|(pa, la, ca), (pb, lb, cb)| {
        pb.cmp(pa)
            .then(lb.delayed.cmp(&la.delayed))
            .then(lb.delay_ratio().total_cmp(&la.delay_ratio()))
            .then(lb.flights.cmp(&la.flights))
            .then(ca.cmp(cb))
    });
    Ok(keyed.into_iter().map(|(_, _, c)| c).collect())
}

/// Whether `candidate` is less loaded than `busy`: fewer delayed flights
/// within the same category, a lower delay ratio across categories.
fn relieves(busy: (&Airport, AirportLoad), candidate: (&Airport, AirportLoad)) -> bool {
    if busy.0.category == candidate.0.category {
        candidate.1.delayed < busy.1.delayed
    } else {
        candidate.1.delay_ratio() < busy.1.delay_ratio() - RATIO_EPS
    }
}

/// Closest eligible assistant for `busy`: within the pairing radius, not busy,
/// not already paired, and less loaded. Ties on distance go to the lower code.
pub fn select_partner(
    busy: AirportCode,
    stats: &WindowStats,
    registry: &Registry,
    busy_set: &BTreeSet<AirportCode>,
    already_paired: &BTreeSet<AirportCode>,
    th: &BusyThresholds,
) -> Result<Option<AirportCode>> {
    let origin = registry.lookup(busy)?;
    let origin_load = stats.load(busy)?;
    let mut best: Option<(f64, AirportCode)> = None;
    for candidate in registry {
        let code = candidate.code;
        if code == busy || busy_set.contains(&code) || already_paired.contains(&code) {
            continue;
        }
        let dist = great_circle_nm(origin.position(), candidate.position());
        if dist > th.pairing_radius_nm {
            continue;
        }
        if !relieves((origin, origin_load), (candidate, stats.load(code)?)) {
            continue;
        }
        if best.is_none_or(|(d, c)| dist < d || (dist == d && code < c)) {
            best = Some((dist, code));
        }
    }
    Ok(best.map(|(_, c)| c))
}

/// Another busy airport strictly inside the smallest circle around the pair.
fn enclosing_circle_blocker(
    a: &Airport,
    b: &Airport,
    busy_set: &BTreeSet<AirportCode>,
    registry: &Registry,
) -> Option<AirportCode> {
    let center = midpoint(a.position(), b.position());
    let radius = great_circle_nm(a.position(), b.position()) / 2.0;
    busy_set
        .iter()
        .filter(|&&c| c != a.code && c != b.code)
        .filter_map(|&c| registry.get(c))
        .find(|other| great_circle_nm(center, other.position()) < radius - 1e-9)
        .map(|other| other.code)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub id: usize,
    pub members: Vec<AirportCode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollaborativePair {
    pub busy: AirportCode,
    pub partner: AirportCode,
    pub distance_nm: f64,
}

/// A partner that qualified but was vetoed by a busy airport inside the pair's
/// enclosing circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedPair {
    pub busy: AirportCode,
    pub partner: AirportCode,
    pub blocker: AirportCode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub window: TimeWindow,
    pub clusters: Vec<ClusterEntry>,
    pub pairs: Vec<CollaborativePair>,
    /// Busy airports in rank order.
    pub busy: Vec<AirportCode>,
    /// Busy airports left without an assistant; they need further separation.
    pub unpaired_busy: Vec<AirportCode>,
    pub rejected: Vec<RejectedPair>,
    pub lambda_used: f64,
    pub k: usize,
    pub method: EmbeddingMethod,
    pub rounds: usize,
    pub metrics: Option<WorkloadReport>,
}

impl Configuration {
    pub fn cluster_members(&self) -> Vec<Vec<AirportCode>> {
        self.clusters.iter().map(|c| c.members.clone()).collect()
    }

    pub fn cluster_of(&self, code: AirportCode) -> Option<usize> {
        self.clusters
            .iter()
            .find(|c| c.members.contains(&code))
            .map(|c| c.id)
    }
}

/// Pair busy airports with assistants in rank order and carve each pair out
/// of the adaptive clustering. Empty clusters are dropped and ids renumbered
/// densely: surviving clusters keep their relative order, pairs follow in
/// formation order.
pub fn fine_tune(
    clustering: &Clustering,
    stats: &WindowStats,
    registry: &Registry,
    window: &TimeWindow,
    th: &BusyThresholds,
) -> Result<Configuration> {
    th.validate()?;
    for airport in registry {
        if clustering.label_of(airport.code).is_none() {
            return Err(invalid(alloc::format!(
                "clustering does not cover airport {}",
                airport.code
            )));
        }
    }
    let busy_set: BTreeSet<AirportCode> = busy_airports(registry, stats, window, th)?
        .into_iter()
        .collect();
    let ranked = rank_busy(
        &busy_set.iter().copied().collect::<Vec<_>>(),
        stats,
        registry,
    )?;

    let mut paired = BTreeSet::new();
    let mut pairs = Vec::new();
    let mut rejected = Vec::new();
    let mut unpaired_busy = Vec::new();
    for &busy in &ranked {
        if paired.contains(&busy) {
            continue;
        }
        let Some(partner) = select_partner(busy, stats, registry, &busy_set, &paired, th)? else {
            unpaired_busy.push(busy);
            continue;
        };
        let (a, b) = (registry.lookup(busy)?, registry.lookup(partner)?);
        if let Some(blocker) = enclosing_circle_blocker(a, b, &busy_set, registry) {
            rejected.push(RejectedPair {
                busy,
                partner,
                blocker,
            });
            unpaired_busy.push(busy);
            continue;
        }
        paired.insert(busy);
        paired.insert(partner);
        pairs.push(CollaborativePair {
            busy,
            partner,
            distance_nm: great_circle_nm(a.position(), b.position()),
        });
    }

    let mut clusters = Vec::new();
    for members in clustering.clusters() {
        let kept: Vec<_> = members
            .into_iter()
            .filter(|c| !paired.contains(c))
            .collect();
        if !kept.is_empty() {
            clusters.push(ClusterEntry {
                id: clusters.len(),
                members: kept,
            });
        }
    }
    for pair in &pairs {
        clusters.push(ClusterEntry {
            id: clusters.len(),
            members: alloc::vec![pair.busy, pair.partner],
        });
    }

    Ok(Configuration {
        window: *window,
        clusters,
        pairs,
        busy: ranked,
        unpaired_busy,
        rejected,
        lambda_used: clustering.lambda_used,
        k: clustering.k,
        method: clustering.method,
        rounds: clustering.iterations,
        metrics: None,
    })
}
