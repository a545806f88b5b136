//! Workload-weighted airport graph.
//!
//! Each adjacency edge `(i, j)` receives the weight
//!
//! ```text
//! load_ij = (d_i + d_j) / (f_i + f_j)
//! w_ij    = B ^ ((1 - λ)·100·load_ij + λ·dist_ij - shift)
//! ```
//!
//! with `B < 1`, so idle neighbours get heavy edges and busy neighbours light
//! ones. `λ` trades the delay ratio against great-circle distance (nmi).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::airport::AirportCode;
use crate::error::{invalid, Result};
use crate::geo::AdjacencyGraph;
use crate::linalg::Matrix;
use crate::stats::{AirportLoad, WindowStats};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// Exponent base, strictly between 0 and 1.
    pub base: f64,
    pub shift: f64,
    /// Geographic weight in `[0, 0.5]`.
    pub lambda: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            base: 0.99,
            shift: 300.0,
            lambda: 0.0,
        }
    }
}

impl KernelParams {
    pub const MAX_LAMBDA: f64 = 0.5;

    pub fn new(base: f64, shift: f64, lambda: f64) -> Result<Self> {
        let params = Self {
            base,
            shift,
            lambda,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.base, self.shift, lambda)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base > 0.0 && self.base < 1.0) {
            return Err(invalid(format!(
                "kernel base must be in (0, 1), got {}",
                self.base
            )));
        }
        if !self.shift.is_finite() {
            return Err(invalid("kernel shift must be finite"));
        }
        if !(0.0..=Self::MAX_LAMBDA).contains(&self.lambda) {
            return Err(invalid(format!(
                "lambda must be in [0, 0.5], got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Combined delay ratio of two airports; 0 when neither has flights.
pub fn pair_load(a: AirportLoad, b: AirportLoad) -> f64 {
    let flights = u64::from(a.flights) + u64::from(b.flights);
    if flights == 0 {
        return 0.0;
    }
    (u64::from(a.delayed) + u64::from(b.delayed)) as f64 / flights as f64
}

pub fn edge_weight(load: f64, distance_nm: f64, params: &KernelParams) -> f64 {
    let lambda = params.lambda;
    let exponent = (1.0 - lambda) * (100.0 * load) + lambda * distance_nm - params.shift;
    let w = libm::pow(params.base, exponent);
    assert!(
        w.is_finite() && w > 0.0,
        "edge weight {w} not finite for exponent {exponent}"
    );
    w
}

/// Adjacency graph with kernel weights. `weights` is the dense symmetric
/// adjacency matrix; non-edges and the diagonal are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridGraph {
    pub graph: AdjacencyGraph,
    pub weights: Matrix,
    pub params: KernelParams,
    pub stats_fingerprint: String,
}

impl HybridGraph {
    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn nodes(&self) -> &[AirportCode] {
        &self.graph.nodes
    }

    pub fn view(&self) -> HybridGraphView<'_> {
        HybridGraphView {
            nodes: &self.graph.nodes,
            matrix: (0..self.weights.rows())
                .map(|r| self.weights.row(r))
                .collect(),
            lambda: self.params.lambda,
            base: self.params.base,
        }
    }
}

/// Serializable `{nodes, matrix, lambda, B}` form of a [`HybridGraph`].
#[derive(Debug, Serialize)]
pub struct HybridGraphView<'a> {
    pub nodes: &'a [AirportCode],
    pub matrix: Vec<&'a [f64]>,
    pub lambda: f64,
    #[serde(rename = "B")]
    pub base: f64,
}

pub fn build_hag(
    iag: &AdjacencyGraph,
    stats: &WindowStats,
    params: &KernelParams,
) -> Result<HybridGraph> {
    params.validate()?;
    let loads = iag
        .nodes
        .iter()
        .map(|&c| stats.load(c))
        .collect::<Result<Vec<_>>>()?;
    let n = iag.len();
    let mut weights = Matrix::zeros(n, n);
    for &(i, j) in &iag.edges {
        let w = edge_weight(pair_load(loads[i], loads[j]), iag.distance_nm(i, j), params);
        weights[(i, j)] = w;
        weights[(j, i)] = w;
    }
    Ok(HybridGraph {
        graph: iag.clone(),
        weights,
        params: *params,
        stats_fingerprint: stats.fingerprint(),
    })
}
