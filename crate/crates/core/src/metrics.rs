//! Cross-cluster workload imbalance.
//!
//! Each cluster's mean regular load `F_i` and mean delayed load `D_i` are
//! averaged over its member airports. Imbalance is the sample variance
//! (`n - 1` denominator) of those means across clusters.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::airport::AirportCode;
use crate::error::{invalid, Error, Result};
use crate::stats::WindowStats;

/// What counts as a "regular" flight in `F_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularCount {
    /// `f - d`: flights that left on time.
    #[default]
    NonDelayed,
    /// `f`: every scheduled departure.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterMeans {
    pub regular: f64,
    pub delayed: f64,
    pub members: usize,
}

pub fn cluster_means(
    clusters: &[Vec<AirportCode>],
    stats: &WindowStats,
    mode: RegularCount,
) -> Result<Vec<ClusterMeans>> {
    clusters
        .iter()
        .map(|members| {
            if members.is_empty() {
                return Err(invalid("cluster means of an empty cluster"));
            }
            let (mut regular, mut delayed) = (0u64, 0u64);
            for &code in members {
                let load = stats.load(code)?;
                regular += u64::from(match mode {
                    RegularCount::NonDelayed => load.on_time(),
                    RegularCount::Total => load.flights,
                });
                delayed += u64::from(load.delayed);
            }
            let m = members.len() as f64;
            Ok(ClusterMeans {
                regular: regular as f64 / m,
                delayed: delayed as f64 / m,
                members: members.len(),
            })
        })
        .collect()
}

fn sample_variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
}

/// `(S_F, S_D)` over the cluster means.
pub fn unbalance(means: &[ClusterMeans]) -> Result<(f64, f64)> {
    if means.len() < 2 {
        return Err(Error::Degenerate(format!(
            "variance needs at least two clusters, got {}",
            means.len()
        )));
    }
    Ok((
        sample_variance(means.iter().map(|m| m.regular)),
        sample_variance(means.iter().map(|m| m.delayed)),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnbalanceReport {
    pub clusters: usize,
    pub means: Vec<ClusterMeans>,
    /// Absent when there are fewer than two clusters.
    pub s_regular: Option<f64>,
    pub s_delayed: Option<f64>,
}

impl UnbalanceReport {
    pub fn compute(
        clusters: &[Vec<AirportCode>],
        stats: &WindowStats,
        mode: RegularCount,
    ) -> Result<Self> {
        let means = cluster_means(clusters, stats, mode)?;
        let (s_regular, s_delayed) = match unbalance(&means) {
            Ok((f, d)) => (Some(f), Some(d)),
            Err(Error::Degenerate(_)) => (None, None),
            Err(e) => return Err(e),
        };
        Ok(Self {
            clusters: means.len(),
            means,
            s_regular,
            s_delayed,
        })
    }

    /// Every airport in its own cluster.
    pub fn singleton_baseline(
        codes: &[AirportCode],
        stats: &WindowStats,
        mode: RegularCount,
    ) -> Result<Self> {
        let clusters: Vec<Vec<AirportCode>> = codes.iter().map(|&c| alloc::vec![c]).collect();
        Self::compute(&clusters, stats, mode)
    }
}

/// Percentage reductions `100·(before − after)/before`. `None` when the
/// before-variance is zero or missing; negative values mean the imbalance grew.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub regular_reduction_pct: Option<f64>,
    pub delayed_reduction_pct: Option<f64>,
}

fn pct(before: Option<f64>, after: Option<f64>) -> Option<f64> {
    match (before, after) {
        (Some(b), Some(a)) if b > 0.0 => Some(100.0 * (b - a) / b),
        _ => None,
    }
}

pub fn reduction(before: &UnbalanceReport, after: &UnbalanceReport) -> ReductionReport {
    ReductionReport {
        regular_reduction_pct: pct(before.s_regular, after.s_regular),
        delayed_reduction_pct: pct(before.s_delayed, after.s_delayed),
    }
}

/// Baseline and post-configuration imbalance plus the resulting reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadReport {
    pub regular_count: RegularCount,
    pub baseline: UnbalanceReport,
    pub configured: UnbalanceReport,
    pub reduction: ReductionReport,
}

impl WorkloadReport {
    /// Compare `clusters` against the all-singleton baseline over `codes`.
    pub fn against_singletons(
        codes: &[AirportCode],
        clusters: &[Vec<AirportCode>],
        stats: &WindowStats,
        mode: RegularCount,
    ) -> Result<Self> {
        let baseline = UnbalanceReport::singleton_baseline(codes, stats, mode)?;
        let configured = UnbalanceReport::compute(clusters, stats, mode)?;
        let reduction = reduction(&baseline, &configured);
        Ok(Self {
            regular_count: mode,
            baseline,
            configured,
            reduction,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::AirportLoad;
    use alloc::vec;
    use proptest::prelude::*;

    fn c(s: &str) -> AirportCode {
        AirportCode::new(s).unwrap()
    }

    fn means(values: &[(f64, f64)]) -> Vec<ClusterMeans> {
        values
            .iter()
            .map(|&(regular, delayed)| ClusterMeans {
                regular,
                delayed,
                members: 1,
            })
            .collect()
    }

    #[test]
    fn means_examples() {
        let s = WindowStats::from_loads([
            (c("AAA"), AirportLoad::new(10, 2).unwrap()),
            (c("BBB"), AirportLoad::new(6, 0).unwrap()),
            (c("CCC"), AirportLoad::new(3, 3).unwrap()),
            (c("DDD"), AirportLoad::default()),
        ]);
        let got = cluster_means(
            &[vec![c("AAA"), c("BBB")], vec![c("CCC")], vec![c("DDD")]],
            &s,
            RegularCount::NonDelayed,
        )
        .unwrap();
        assert_eq!((got[0].regular, got[0].delayed), (7.0, 1.0));
        assert_eq!((got[1].regular, got[1].delayed), (0.0, 3.0));
        assert_eq!((got[2].regular, got[2].delayed), (0.0, 0.0));
        let total = cluster_means(&[vec![c("AAA"), c("BBB")]], &s, RegularCount::Total).unwrap();
        assert_eq!(total[0].regular, 8.0);
        assert!(cluster_means(&[vec![]], &s, RegularCount::Total).is_err());
        assert!(cluster_means(&[vec![c("ZZZ")]], &s, RegularCount::Total).is_err());
    }

    #[test]
    fn variance_examples() {
        assert_eq!(
            unbalance(&means(&[(2.0, 0.0), (2.0, 0.0), (2.0, 0.0)]))
                .unwrap()
                .0,
            0.0
        );
        assert_eq!(unbalance(&means(&[(1.0, 0.0), (3.0, 0.0)])).unwrap().0, 2.0);
        assert!(matches!(
            unbalance(&means(&[(1.0, 1.0)])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn reduction_examples() {
        let report = |s: Option<f64>| UnbalanceReport {
            clusters: 2,
            means: Vec::new(),
            s_regular: s,
            s_delayed: s,
        };
        let r = reduction(&report(Some(2.0)), &report(Some(1.0)));
        assert_eq!(r.regular_reduction_pct, Some(50.0));
        assert_eq!(
            reduction(&report(Some(2.0)), &report(Some(2.0))).delayed_reduction_pct,
            Some(0.0)
        );
        assert_eq!(
            reduction(&report(Some(0.0)), &report(Some(1.0))).regular_reduction_pct,
            None
        );
        assert_eq!(
            reduction(&report(Some(1.0)), &report(Some(3.0))).regular_reduction_pct,
            Some(-200.0)
        );
        assert_eq!(
            reduction(&report(Some(1.0)), &report(None)).regular_reduction_pct,
            None
        );
    }

    #[test]
    fn single_cluster_has_no_variance() {
        let s = WindowStats::from_loads([(c("AAA"), AirportLoad::new(4, 1).unwrap())]);
        let report =
            UnbalanceReport::compute(&[vec![c("AAA")]], &s, RegularCount::NonDelayed).unwrap();
        assert_eq!((report.s_regular, report.s_delayed), (None, None));
    }

    /// Two-pass textbook variance, written independently of `sample_variance`.
    fn textbook_variance(xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let sum: f64 = xs.iter().sum();
        let sum_sq: f64 = xs.iter().map(|x| x * x).sum();
        (sum_sq - sum * sum / n) / (n - 1.0)
    }

    proptest! {
        #[test]
        fn conservation_and_cross_check(
            loads in proptest::collection::vec((0u32..60, 0u32..60), 2..20),
            cuts in proptest::collection::vec(any::<bool>(), 20),
        ) {
            let codes: Vec<AirportCode> = (0..loads.len()).map(|i| AirportCode::new(&alloc::format!("A{i:02}")).unwrap()).collect();
            let stats = WindowStats::from_loads(codes.iter().zip(&loads).map(|(&code, &(f, d))| {
                (code, AirportLoad::new(f.max(d), d.min(f.max(d))).unwrap())
            }));
            // contiguous blocks split wherever `cuts` says so
            let mut clusters: Vec<Vec<AirportCode>> = vec![vec![codes[0]]];
            for (i, &code) in codes.iter().enumerate().skip(1) {
                if cuts[i] {
                    clusters.push(Vec::new());
                }
                clusters.last_mut().unwrap().push(code);
            }
            let m = cluster_means(&clusters, &stats, RegularCount::NonDelayed).unwrap();
            let weighted: f64 = m.iter().map(|x| x.members as f64 * (x.regular + x.delayed)).sum();
            prop_assert!((weighted - stats.total_flights() as f64).abs() < 1e-6);

            if m.len() >= 2 {
                let (sf, sd) = unbalance(&m).unwrap();
                let f: Vec<f64> = m.iter().map(|x| x.regular).collect();
                let d: Vec<f64> = m.iter().map(|x| x.delayed).collect();
                prop_assert!((sf - textbook_variance(&f)).abs() <= 1e-6 * (1.0 + sf.abs()));
                prop_assert!((sd - textbook_variance(&d)).abs() <= 1e-6 * (1.0 + sd.abs()));
                prop_assert!(sf >= 0.0 && sd >= 0.0);
                let mut reversed = m.clone();
                reversed.reverse();
                let (rf, rd) = unbalance(&reversed).unwrap();
                prop_assert!((rf - sf).abs() < 1e-9 && (rd - sd).abs() < 1e-9);
            }

            // singleton configurations reproduce the raw per-airport variance
            let singles = UnbalanceReport::singleton_baseline(&codes, &stats, RegularCount::NonDelayed).unwrap();
            let raw: Vec<f64> = codes.iter().map(|&c| f64::from(stats.get(c).unwrap().delayed)).collect();
            prop_assert!((singles.s_delayed.unwrap() - textbook_variance(&raw)).abs() < 1e-6);
        }
    }
}
