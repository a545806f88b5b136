//! One window end to end: stats, adjacency graph, adaptive clustering,
//! fine-tuning and workload metrics.

use std::fs;
use std::path::Path;

use airconf_core::cluster::RoundTrace;
use airconf_core::embed::{train_autoencoder, AeModel};
use airconf_core::metrics::WorkloadReport;
use airconf_core::{
    adaptive_configure, adaptive_configure_with_model, build_hag, build_iag, fine_tune,
    window_stats, AirportCode, AirportLoad, Clustering, Configuration, EmbedChoice, FlightRecord,
    Registry, TimeWindow, WindowStats,
};
use serde::{Deserialize, Serialize};

use crate::error::AppError;
use crate::manifest::{PipelineParams, RunManifest};

/// Everything computed for one window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowRun {
    pub window: TimeWindow,
    pub stats: WindowStats,
    pub clustering: Clustering,
    pub configuration: Configuration,
}

impl WindowRun {
    pub fn report(&self) -> &WorkloadReport {
        self.configuration
            .metrics
            .as_ref()
            .expect("run_window attaches metrics")
    }
}

pub fn run_window(
    records: &[FlightRecord],
    registry: &Registry,
    window: &TimeWindow,
    params: &PipelineParams,
    model: Option<&AeModel>,
) -> Result<WindowRun, AppError> {
    let stats = window_stats(records, window, registry)?;
    let iag = build_iag(registry, &params.iag)?;
    let clustering = match model {
        Some(m) => adaptive_configure_with_model(
            &iag,
            &stats,
            &params.kernel,
            &params.adaptive,
            m,
            params.seed,
        )?,
        None => adaptive_configure(
            &iag,
            &stats,
            &params.kernel,
            &params.adaptive,
            &params.embedding,
            params.seed,
        )?,
    };
    let mut configuration = fine_tune(&clustering, &stats, registry, window, &params.busy)?;
    configuration.metrics = Some(WorkloadReport::against_singletons(
        &registry.codes(),
        &configuration.cluster_members(),
        &stats,
        params.regular_count,
    )?);
    Ok(WindowRun {
        window: *window,
        stats,
        clustering,
        configuration,
    })
}

/// Train the autoencoder on the window's round-0 graph, as the adaptive loop
/// would, so it can be saved and reused.
pub fn train_window_model(
    records: &[FlightRecord],
    registry: &Registry,
    window: &TimeWindow,
    params: &PipelineParams,
) -> Result<AeModel, AppError> {
    let EmbedChoice::Autoencoder { config, .. } = params.embedding else {
        return Err(AppError::bad_input(anyhow::anyhow!(
            "saving a model requires the autoencoder method"
        )));
    };
    let stats = window_stats(records, window, registry)?;
    let iag = build_iag(registry, &params.iag)?;
    if iag.len() < 2 {
        return Err(AppError::bad_input(anyhow::anyhow!(
            "an autoencoder needs at least two airports"
        )));
    }
    let hag = build_hag(
        &iag,
        &stats,
        &params.kernel.with_lambda(params.adaptive.lambda_at(0))?,
    )?;
    let config = airconf_core::embed::AeConfig {
        latent_dim: config.latent_dim.clamp(1, iag.len() - 1),
        ..config
    };
    Ok(train_autoencoder(&hag, &config)?)
}

/// Ingest counters for a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSummary {
    pub records: usize,
    pub rejected: usize,
    pub filtered: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConfigurationArtifact {
    pub manifest: RunManifest,
    pub configuration: Configuration,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StatsSummary {
    pub fingerprint: String,
    pub total_flights: u64,
    pub ignored_records: usize,
    pub loads: std::collections::BTreeMap<AirportCode, AirportLoad>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportArtifact {
    pub manifest: RunManifest,
    pub window: TimeWindow,
    pub input: InputSummary,
    pub stats: StatsSummary,
    pub report: WorkloadReport,
    pub trace: Vec<RoundTrace>,
}

pub fn configuration_artifact(manifest: &RunManifest, run: &WindowRun) -> ConfigurationArtifact {
    ConfigurationArtifact {
        manifest: manifest.for_window(&run.window),
        configuration: run.configuration.clone(),
    }
}

pub fn report_artifact(
    manifest: &RunManifest,
    run: &WindowRun,
    input: InputSummary,
) -> ReportArtifact {
    ReportArtifact {
        manifest: manifest.for_window(&run.window),
        window: run.window,
        input,
        stats: StatsSummary {
            fingerprint: run.stats.fingerprint(),
            total_flights: run.stats.total_flights(),
            ignored_records: run.stats.ignored,
            loads: run.stats.loads.clone(),
        },
        report: run.report().clone(),
        trace: run.clustering.trace.clone(),
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| {
        AppError::Internal(anyhow::Error::new(e).context(format!("writing {}", path.display())))
    })
}
