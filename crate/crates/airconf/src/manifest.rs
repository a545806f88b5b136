use std::path::PathBuf;

use airconf_core::finetune::BusyThresholds;
use airconf_core::metrics::RegularCount;
use airconf_core::{AdaptiveParams, Date, EmbedChoice, IagParams, KernelParams, TimeWindow};
use serde::{Deserialize, Serialize};

use crate::error::AppError;
use crate::ingest::DEFAULT_DELAY_THRESHOLD_MIN;

/// Every tunable of one window run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub delay_threshold_min: i32,
    pub iag: IagParams,
    /// `lambda` here is the starting value; the adaptive loop overrides it.
    pub kernel: KernelParams,
    pub adaptive: AdaptiveParams,
    pub embedding: EmbedChoice,
    pub busy: BusyThresholds,
    pub regular_count: RegularCount,
    pub seed: u64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            delay_threshold_min: DEFAULT_DELAY_THRESHOLD_MIN,
            iag: IagParams::default(),
            kernel: KernelParams::default(),
            adaptive: AdaptiveParams::default(),
            embedding: EmbedChoice::spectral(),
            busy: BusyThresholds::default(),
            regular_count: RegularCount::default(),
            seed: 0,
        }
    }
}

/// Inputs and parameters of a run. Embedded in every artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// `None` means no flight file: every airport idle.
    pub flights: Option<PathBuf>,
    /// `None` means the bundled Florida registry.
    pub registry: Option<PathBuf>,
    pub dates: Vec<Date>,
    /// `HH:MM-HH:MM` spans applied to every date.
    pub windows: Vec<String>,
    /// Pretrained autoencoder used in every round instead of training.
    pub ae_model: Option<PathBuf>,
    pub params: PipelineParams,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunManifest {
    /// All `date × span` windows in date-major order.
    pub fn time_windows(&self) -> Result<Vec<TimeWindow>, AppError> {
        if self.dates.is_empty() || self.windows.is_empty() {
            return Err(AppError::bad_input(anyhow::anyhow!(
                "at least one date and one window are required"
            )));
        }
        let mut out = Vec::with_capacity(self.dates.len() * self.windows.len());
        for &date in &self.dates {
            for span in &self.windows {
                out.push(TimeWindow::parse_span(date, span)?);
            }
        }
        Ok(out)
    }

    /// The manifest narrowed to one window, as embedded in that window's artifacts.
    pub fn for_window(&self, window: &TimeWindow) -> RunManifest {
        RunManifest {
            dates: vec![window.date],
            windows: vec![window.span_label()],
            ..self.clone()
        }
    }
}
