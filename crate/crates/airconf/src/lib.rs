//! IO and command-line front end for the `airconf-core` airport clustering
//! pipeline.
//!
//! * [`ingest`] reads BTS-style on-time CSV exports into flight records.
//! * [`registry`] loads airport registries (CSV or JSON) and ships the
//!   21-airport Florida registry.
//! * [`pipeline`] runs one time window end to end.
//! * [`sweep`] and [`compare`] implement the multi-window experiments and the
//!   embedding comparison.
//! * [`export`] renders configurations as GeoJSON and text tables.

pub mod compare;
pub mod error;
pub mod export;
pub mod ingest;
pub mod manifest;
pub mod pipeline;
pub mod registry;
pub mod sweep;

pub use error::AppError;
pub use manifest::{PipelineParams, RunManifest};
pub use pipeline::{run_window, WindowRun};
