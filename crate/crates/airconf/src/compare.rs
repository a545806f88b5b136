//! Spectral vs autoencoder comparison: embedding timings over nested
//! registry subsets, and whether each method's clusters stay connected in
//! the adjacency graph.

use std::time::{Duration, Instant};

use airconf_core::embed::{encode, spectral_embedding, train_autoencoder, AeConfig};
use airconf_core::{
    adaptive_configure, build_hag, build_iag, AdjacencyGraph, EmbedChoice, HybridGraph, Registry,
    WindowStats,
};
use serde::{Deserialize, Serialize};

use crate::error::AppError;
use crate::export::table;
use crate::manifest::PipelineParams;

pub const DEFAULT_SIZES: [usize; 5] = [7, 10, 15, 18, 21];
pub const REPETITIONS: usize = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub size: usize,
    pub latent_dim: usize,
    pub spectral_dim: usize,
    /// Median wall-clock in microseconds.
    pub spectral_us: f64,
    pub encode_us: f64,
    pub ae_train_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdherenceRow {
    pub method: String,
    pub latent_dim: Option<usize>,
    pub k: usize,
    pub clusters: usize,
    /// Clusters whose members do not form a connected subgraph.
    pub non_adjacent: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub timings: Vec<TimingRow>,
    pub skipped: Vec<String>,
    pub adherence: Vec<AdherenceRow>,
}

fn median_us(reps: usize, mut f: impl FnMut()) -> f64 {
    let mut samples: Vec<Duration> = (0..reps)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .collect();
    samples.sort();
    samples[samples.len() / 2].as_secs_f64() * 1e6
}

fn round0_graph(
    registry: &Registry,
    stats: &WindowStats,
    params: &PipelineParams,
) -> Result<(AdjacencyGraph, HybridGraph), AppError> {
    let iag = build_iag(registry, &params.iag)?;
    let hag = build_hag(
        &iag,
        stats,
        &params.kernel.with_lambda(params.adaptive.lambda_at(0))?,
    )?;
    Ok((iag, hag))
}

fn restrict(stats: &WindowStats, registry: &Registry) -> WindowStats {
    let mut out = WindowStats::from_loads(
        registry
            .iter()
            .map(|a| (a.code, stats.get(a.code).unwrap_or_default())),
    );
    out.ignored = stats.ignored;
    out
}

/// Time the spectral decomposition against autoencoder encoding and training
/// on the round-0 graph of the first `size` airports by code.
pub fn timings(
    registry: &Registry,
    stats: &WindowStats,
    params: &PipelineParams,
    ae: &AeConfig,
    sizes: &[usize],
    reps: usize,
) -> Result<(Vec<TimingRow>, Vec<String>), AppError> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &size in sizes {
        if size < 2 || size > registry.len() {
            skipped.push(format!(
                "size {size}: registry has {} airports",
                registry.len()
            ));
            continue;
        }
        let sub = registry.first_by_code(size)?;
        let (_, hag) = round0_graph(&sub, &restrict(stats, &sub), params)?;
        let spectral_dim = size.div_ceil(2);
        let config = AeConfig {
            latent_dim: ae.latent_dim.clamp(1, size - 1),
            ..*ae
        };
        let model = train_autoencoder(&hag, &config)?;
        let spectral_us = median_us(reps, || {
            std::hint::black_box(
                spectral_embedding(&hag, spectral_dim).expect("spectral embedding"),
            );
        });
        let encode_us = median_us(reps, || {
            std::hint::black_box(encode(&model, &hag).expect("encode"));
        });
        let ae_train_us = median_us(reps, || {
            std::hint::black_box(train_autoencoder(&hag, &config).expect("training"));
        });
        rows.push(TimingRow {
            size,
            latent_dim: config.latent_dim,
            spectral_dim,
            spectral_us,
            encode_us,
            ae_train_us,
        });
    }
    Ok((rows, skipped))
}

/// Run the adaptive loop with spectral and autoencoder embeddings and list
/// clusters that are not connected in the adjacency graph.
pub fn adherence(
    registry: &Registry,
    stats: &WindowStats,
    params: &PipelineParams,
    ae: &AeConfig,
    latents: &[usize],
) -> Result<Vec<AdherenceRow>, AppError> {
    let iag = build_iag(registry, &params.iag)?;
    let mut choices = vec![("spectral".to_string(), None, EmbedChoice::spectral())];
    for &latent in latents {
        let choice = EmbedChoice::Autoencoder {
            config: AeConfig {
                latent_dim: latent,
                ..*ae
            },
            reuse_model: false,
        };
        choices.push(("autoencoder".to_string(), Some(latent), choice));
    }
    let mut rows = Vec::new();
    for (method, latent_dim, choice) in choices {
        let clustering = adaptive_configure(
            &iag,
            stats,
            &params.kernel,
            &params.adaptive,
            &choice,
            params.seed,
        )?;
        let clusters = clustering.clusters();
        let non_adjacent = clusters
            .iter()
            .filter(|members| {
                let idx: Vec<usize> = members.iter().filter_map(|&c| iag.index_of(c)).collect();
                !iag.is_connected_subset(&idx)
            })
            .map(|members| members.iter().map(|c| c.to_string()).collect())
            .collect();
        rows.push(AdherenceRow {
            method,
            latent_dim,
            k: clustering.k,
            clusters: clusters.len(),
            non_adjacent,
        });
    }
    Ok(rows)
}

pub fn compare(
    registry: &Registry,
    stats: &WindowStats,
    params: &PipelineParams,
    ae: &AeConfig,
    sizes: &[usize],
) -> Result<CompareReport, AppError> {
    let (timings, skipped) = timings(registry, stats, params, ae, sizes, REPETITIONS)?;
    let adherence = if registry.len() >= 2 {
        adherence(registry, stats, params, ae, &[2, 10])?
    } else {
        Vec::new()
    };
    Ok(CompareReport {
        timings,
        skipped,
        adherence,
    })
}

pub fn compare_text(report: &CompareReport) -> String {
    let rows: Vec<Vec<String>> = report
        .timings
        .iter()
        .map(|r| {
            vec![
                format!("{0}x{0}", r.size),
                format!("{:.1}", r.spectral_us),
                format!("{:.1}", r.encode_us),
                format!("{:.1}", r.ae_train_us),
                r.latent_dim.to_string(),
            ]
        })
        .collect();
    let mut out = table(
        &["graph", "spectral us", "encode us", "ae train us", "latent"],
        &rows,
    );
    for s in &report.skipped {
        out.push_str(&format!("skipped {s}\n"));
    }
    out.push('\n');
    let rows: Vec<Vec<String>> = report
        .adherence
        .iter()
        .map(|r| {
            let groups: Vec<String> = r.non_adjacent.iter().map(|g| g.join("+")).collect();
            vec![
                r.method.clone(),
                r.latent_dim.map_or_else(|| "-".into(), |l| l.to_string()),
                r.clusters.to_string(),
                if groups.is_empty() {
                    "none".into()
                } else {
                    groups.join(" ")
                },
            ]
        })
        .collect();
    out.push_str(&table(
        &["method", "latent", "clusters", "non-adjacent clusters"],
        &rows,
    ));
    out
}
