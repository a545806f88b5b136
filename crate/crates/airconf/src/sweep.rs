//! Multi-window experiments: one pipeline run per `date × span`, plus a
//! summary table with pair and unpaired-busy frequencies.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use airconf_core::embed::AeModel;
use airconf_core::{FlightRecord, Registry, TimeWindow};
use serde::{Deserialize, Serialize};

use crate::error::AppError;
use crate::export::{pct, table};
use crate::manifest::RunManifest;
use crate::pipeline::{run_window, WindowRun};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub window: TimeWindow,
    pub total_flights: u64,
    pub clusters: usize,
    pub regular_reduction_pct: Option<f64>,
    pub delayed_reduction_pct: Option<f64>,
    pub pairs: Vec<String>,
    pub unpaired_busy: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyEntry {
    pub key: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub manifest: RunManifest,
    pub rows: Vec<SweepRow>,
    /// Most frequent first, ties by key.
    pub pair_tally: Vec<TallyEntry>,
    pub unpaired_busy_tally: Vec<TallyEntry>,
}

impl SweepSummary {
    pub fn top_pairs(&self, n: usize) -> Vec<&str> {
        self.pair_tally
            .iter()
            .take(n)
            .map(|e| e.key.as_str())
            .collect()
    }
}

fn tally<'a>(keys: impl Iterator<Item = &'a String>) -> Vec<TallyEntry> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for k in keys {
        *counts.entry(k).or_default() += 1;
    }
    let mut out: Vec<TallyEntry> = counts
        .into_iter()
        .map(|(k, count)| TallyEntry {
            key: k.to_string(),
            count,
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.key.cmp(&b.key)));
    out
}

pub fn summarize(manifest: &RunManifest, runs: &[WindowRun]) -> SweepSummary {
    let rows: Vec<SweepRow> = runs
        .iter()
        .map(|run| {
            let c = &run.configuration;
            let r = &run.report().reduction;
            SweepRow {
                window: run.window,
                total_flights: run.stats.total_flights(),
                clusters: c.clusters.len(),
                regular_reduction_pct: r.regular_reduction_pct,
                delayed_reduction_pct: r.delayed_reduction_pct,
                pairs: c
                    .pairs
                    .iter()
                    .map(|p| format!("{}-{}", p.busy, p.partner))
                    .collect(),
                unpaired_busy: c.unpaired_busy.iter().map(|a| a.to_string()).collect(),
            }
        })
        .collect();
    SweepSummary {
        manifest: manifest.clone(),
        pair_tally: tally(rows.iter().flat_map(|r| &r.pairs)),
        unpaired_busy_tally: tally(rows.iter().flat_map(|r| &r.unpaired_busy)),
        rows,
    }
}

/// Run every window of the manifest. With `jobs > 1` windows run on scoped
/// threads; results are returned in window order either way.
pub fn run_sweep(
    records: &[FlightRecord],
    registry: &Registry,
    manifest: &RunManifest,
    model: Option<&AeModel>,
    jobs: usize,
) -> Result<Vec<WindowRun>, AppError> {
    let windows = manifest.time_windows()?;
    let run = |w: &TimeWindow| {
        run_window(records, registry, w, &manifest.params, model)
            .map_err(|e| e.with_context(format!("window {w}")))
    };
    let jobs = jobs.clamp(1, windows.len());
    if jobs == 1 {
        return windows.iter().map(run).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<WindowRun, AppError>>>> =
        Mutex::new((0..windows.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(w) = windows.get(i) else { break };
                let result = run(w);
                slots
                    .lock()
                    .expect("no worker panics while holding the lock")[i] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|slot| slot.expect("every window ran"))
        .collect()
}

pub fn summary_text(summary: &SweepSummary) -> String {
    let rows: Vec<Vec<String>> = summary
        .rows
        .iter()
        .map(|r| {
            vec![
                r.window.to_string(),
                r.total_flights.to_string(),
                r.clusters.to_string(),
                pct(r.regular_reduction_pct),
                pct(r.delayed_reduction_pct),
                if r.pairs.is_empty() {
                    "-".into()
                } else {
                    r.pairs.join(" ")
                },
                if r.unpaired_busy.is_empty() {
                    "-".into()
                } else {
                    r.unpaired_busy.join(" ")
                },
            ]
        })
        .collect();
    let mut out = table(
        &[
            "window",
            "flights",
            "clusters",
            "regular",
            "delayed",
            "pairs",
            "unpaired busy",
        ],
        &rows,
    );
    let tally_rows = |t: &[TallyEntry]| -> Vec<Vec<String>> {
        t.iter()
            .map(|e| vec![e.key.clone(), e.count.to_string()])
            .collect()
    };
    out.push('\n');
    out.push_str(&table(&["pair", "count"], &tally_rows(&summary.pair_tally)));
    out.push('\n');
    out.push_str(&table(
        &["unpaired busy", "count"],
        &tally_rows(&summary.unpaired_busy_tally),
    ));
    out
}
