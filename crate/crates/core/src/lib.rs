//! Airport workload clustering for dynamic airspace configuration.
//!
//! The pipeline groups geographically adjacent airports into collaborative
//! clusters so that controller workload is balanced across clusters:
//!
//! 1. [`geo::build_iag`] connects each airport to its nearest neighbour in
//!    every azimuth sector (the initial adjacency graph).
//! 2. [`graph::build_hag`] weights those edges with a workload kernel so that
//!    lightly loaded neighbours attract each other.
//! 3. [`embed`] compresses the weighted adjacency matrix, either through the
//!    graph Laplacian spectrum or through a small autoencoder.
//! 4. [`cluster::adaptive_configure`] runs k-means on the embedding and
//!    escalates the cluster count and geographic weight until every cluster
//!    is small and compact.
//! 5. [`finetune::fine_tune`] pairs busy airports with nearby idle assistants.
//! 6. [`metrics`] measures the cross-cluster workload variance before and
//!    after reconfiguration.
//!
//! The crate is `no_std` (with `alloc`). CSV ingest and the command line live
//! in the `airconf` companion crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` comparisons reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod airport;
pub mod cluster;
pub mod embed;
pub mod error;
pub mod finetune;
pub mod geo;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod stats;

pub use airport::{Airport, AirportCode, Category, Registry};
pub use cluster::{
    adaptive_configure, adaptive_configure_with_model, AdaptiveParams, Clustering, EmbedChoice,
};
pub use embed::{Embedding, EmbeddingMethod};
pub use error::{Error, Result};
pub use finetune::{fine_tune, BusyThresholds, Configuration};
pub use geo::{build_iag, AdjacencyGraph, GeoPoint, IagParams};
pub use graph::{build_hag, HybridGraph, KernelParams};
pub use metrics::{ReductionReport, RegularCount, UnbalanceReport};
pub use stats::{window_stats, AirportLoad, Date, FlightRecord, TimeWindow, WindowStats};
