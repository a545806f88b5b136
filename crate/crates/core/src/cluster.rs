//! k-means over embeddings and the adaptive cluster-count / geographic-weight
//! escalation loop.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::airport::{AirportCode, Registry};
use crate::embed::{
    encode, spectral_embedding, train_autoencoder, AeConfig, AeModel, Embedding, EmbeddingMethod,
};
use crate::error::{invalid, Result};
use crate::geo::{great_circle_nm, AdjacencyGraph, GeoPoint};
use crate::graph::{build_hag, KernelParams};
use crate::linalg::Matrix;
use crate::stats::WindowStats;

pub const KMEANS_MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansOutcome {
    /// Cluster id per row, dense in `[0, k)`, numbered by first appearance.
    pub labels: Vec<usize>,
    /// Within-cluster sum of squares after initialization and after every
    /// Lloyd iteration.
    pub sse_log: Vec<f64>,
    pub iterations: usize,
}

impl KMeansOutcome {
    pub fn sse(&self) -> f64 {
        self.sse_log.last().copied().unwrap_or(0.0)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sum of squared distances of each point to its cluster mean.
pub fn within_cluster_sse(points: &Matrix, labels: &[usize], k: usize) -> f64 {
    let centers = centroids(points, labels, k);
    (0..points.rows())
        .map(|i| sq_dist(points.row(i), centers.row(labels[i])))
        .sum()
}

fn centroids(points: &Matrix, labels: &[usize], k: usize) -> Matrix {
    let dim = points.cols();
    let mut sums = Matrix::zeros(k, dim);
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, v) in sums.row_mut(l).iter_mut().zip(points.row(i)) {
            *s += v;
        }
    }
    for (l, &count) in counts.iter().enumerate() {
        if count > 0 {
            for s in sums.row_mut(l) {
                *s /= count as f64;
            }
        }
    }
    sums
}

/// Pick among tied candidates; the seed rotates the choice.
fn pick_tied(tied: &[usize], seed: u64) -> usize {
    tied[(seed % tied.len() as u64) as usize]
}

fn farthest_point_init(points: &Matrix, k: usize, seed: u64) -> Vec<usize> {
    let n = points.rows();
    let zero = vec![0.0; points.cols()];
    let norms: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), &zero)).collect();
    let best = norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // ties by node order for the first center
    let first = norms.iter().position(|&v| v == best).unwrap_or(0);
    let mut chosen = vec![first];
    let mut min_dist: Vec<f64> = (0..n)
        .map(|i| sq_dist(points.row(i), points.row(first)))
        .collect();
    while chosen.len() < k {
        let far = (0..n)
            .filter(|i| !chosen.contains(i))
            .map(|i| min_dist[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = (0..n)
            .filter(|i| !chosen.contains(i) && min_dist[*i] == far)
            .collect();
        let next = pick_tied(&tied, seed);
        chosen.push(next);
        for i in 0..n {
            min_dist[i] = min_dist[i].min(sq_dist(points.row(i), points.row(next)));
        }
    }
    chosen
}

fn assign(points: &Matrix, centers: &Matrix) -> Vec<usize> {
    (0..points.rows())
        .map(|i| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for c in 0..centers.rows() {
                let d = sq_dist(points.row(i), centers.row(c));
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Move the farthest point of a multi-member cluster into each empty cluster.
/// Each move strictly removes that point's contribution, so SSE cannot grow.
fn reseed_empty(points: &Matrix, labels: &mut [usize], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let centers = centroids(points, labels, k);
        let mut best: Option<(f64, usize)> = None;
        for i in 0..points.rows() {
            if counts[labels[i]] < 2 {
                continue;
            }
            let d = sq_dist(points.row(i), centers.row(labels[i]));
            if best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, i));
            }
        }
        match best {
            Some((_, i)) => labels[i] = empty,
            None => return,
        }
    }
}

fn relabel_by_first_appearance(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Lloyd's k-means from a deterministic farthest-point initialization.
///
/// The first center is the row of largest norm (earliest row on ties); each
/// further center maximizes its distance to the chosen ones, with exact ties
/// resolved by `seed`. Iterates until assignments stop changing or
/// [`KMEANS_MAX_ITERATIONS`] is reached.
pub fn kmeans(points: &Matrix, k: usize, seed: u64) -> Result<KMeansOutcome> {
    let n = points.rows();
    if k == 0 || k > n {
        return Err(invalid(format!("k must be in [1, {n}], got {k}")));
    }
    let init = farthest_point_init(points, k, seed);
    let centers = Matrix::from_fn(k, points.cols(), |c, d| points[(init[c], d)]);
    let mut labels = assign(points, &centers);
    reseed_empty(points, &mut labels, k);
    let mut sse_log = vec![within_cluster_sse(points, &labels, k)];
    let mut iterations = 0;
    while iterations < KMEANS_MAX_ITERATIONS {
        iterations += 1;
        let centers = centroids(points, &labels, k);
        let mut next = assign(points, &centers);
        reseed_empty(points, &mut next, k);
        let stable = next == labels;
        labels = next;
        sse_log.push(within_cluster_sse(points, &labels, k));
        if stable {
            break;
        }
    }
    Ok(KMeansOutcome {
        labels: relabel_by_first_appearance(&labels),
        sse_log,
        iterations,
    })
}

pub fn kmeans_embedding(embedding: &Embedding, k: usize, seed: u64) -> Result<KMeansOutcome> {
    kmeans(&embedding.vectors, k, seed)
}

fn diameter_of(points: &[GeoPoint]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            worst = worst.max(great_circle_nm(*a, *b));
        }
    }
    worst
}

/// Largest pairwise great-circle distance among the members, 0 for one member.
pub fn cluster_diameter(members: &[AirportCode], registry: &Registry) -> Result<f64> {
    if members.is_empty() {
        return Err(invalid("cluster diameter of an empty cluster"));
    }
    let points = members
        .iter()
        .map(|&c| registry.lookup(c).map(|a| a.position()))
        .collect::<Result<Vec<_>>>()?;
    Ok(diameter_of(&points))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveParams {
    pub max_cluster_size: usize,
    pub max_diameter_nm: f64,
    pub lambda_step: f64,
    pub lambda_cap: f64,
}

impl Default for AdaptiveParams {
    fn default() -> Self {
        Self {
            max_cluster_size: 3,
            max_diameter_nm: 100.0,
            lambda_step: 0.1,
            lambda_cap: 0.5,
        }
    }
}

impl AdaptiveParams {
    fn validate(&self) -> Result<()> {
        if self.max_cluster_size == 0 || !(self.max_diameter_nm > 0.0) || !(self.lambda_step > 0.0)
        {
            return Err(invalid("adaptive parameters must be positive"));
        }
        if !(self.lambda_cap > 0.0 && self.lambda_cap <= KernelParams::MAX_LAMBDA) {
            return Err(invalid(format!(
                "lambda cap must be in (0, 0.5], got {}",
                self.lambda_cap
            )));
        }
        Ok(())
    }

    /// Geographic weight used in escalation round `round` (0-based).
    pub fn lambda_at(&self, round: usize) -> f64 {
        (self.lambda_step * round as f64).min(self.lambda_cap)
    }
}

/// Which compression feeds k-means inside the adaptive loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum EmbedChoice {
    /// Laplacian eigenvectors; `dim = None` uses the current k.
    Spectral { dim: Option<usize> },
    /// Autoencoder with the given settings (latent size is capped at n - 1).
    /// With `reuse_model`, the round-0 model re-encodes later graphs instead
    /// of retraining.
    Autoencoder { config: AeConfig, reuse_model: bool },
}

impl EmbedChoice {
    pub fn spectral() -> Self {
        EmbedChoice::Spectral { dim: None }
    }

    pub fn method(&self) -> EmbeddingMethod {
        match self {
            EmbedChoice::Spectral { .. } => EmbeddingMethod::Spectral,
            EmbedChoice::Autoencoder { .. } => EmbeddingMethod::Autoencoder,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub cluster: usize,
    pub members: Vec<AirportCode>,
    pub diameter_nm: f64,
}

/// One pass of the adaptive loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round: usize,
    pub k: usize,
    pub lambda: f64,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub nodes: Vec<AirportCode>,
    /// Cluster id of `nodes[i]`, dense in `[0, k)`.
    pub labels: Vec<usize>,
    pub k: usize,
    pub lambda_used: f64,
    pub method: EmbeddingMethod,
    /// Escalation rounds taken after the initial clustering.
    pub iterations: usize,
    pub trace: Vec<RoundTrace>,
}

impl Clustering {
    /// Members of every cluster, indexed by cluster id, in node order.
    pub fn clusters(&self) -> Vec<Vec<AirportCode>> {
        let mut out = vec![Vec::new(); self.k];
        for (&code, &label) in self.nodes.iter().zip(&self.labels) {
            out[label].push(code);
        }
        out
    }

    pub fn label_of(&self, code: AirportCode) -> Option<usize> {
        self.nodes
            .iter()
            .position(|&c| c == code)
            .map(|i| self.labels[i])
    }
}

fn find_violations(
    iag: &AdjacencyGraph,
    labels: &[usize],
    k: usize,
    params: &AdaptiveParams,
) -> Vec<Violation> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    members
        .into_iter()
        .enumerate()
        .filter_map(|(cluster, idx)| {
            let points: Vec<GeoPoint> = idx.iter().map(|&i| iag.positions[i]).collect();
            let diameter_nm = diameter_of(&points);
            (idx.len() > params.max_cluster_size || diameter_nm > params.max_diameter_nm).then(
                || Violation {
                    cluster,
                    members: idx.iter().map(|&i| iag.nodes[i]).collect(),
                    diameter_nm,
                },
            )
        })
        .collect()
}

/// Adaptive clustering.
///
/// Starts with `λ = 0` and `k = ⌈n/2⌉`. Each round builds the weighted graph
/// at the current `λ`, embeds it, and runs k-means. If any cluster has more
/// than `max_cluster_size` members or a diameter above `max_diameter_nm`,
/// `k` grows by one and `λ` by `lambda_step` (saturating at `lambda_cap`) and
/// the round repeats. Ends at the first clustering without violations, or at
/// `k = n`.
pub fn adaptive_configure(
    iag: &AdjacencyGraph,
    stats: &WindowStats,
    kernel: &KernelParams,
    params: &AdaptiveParams,
    choice: &EmbedChoice,
    seed: u64,
) -> Result<Clustering> {
    adaptive_loop(iag, stats, kernel, params, choice, None, seed)
}

/// Adaptive clustering that encodes every round with an already trained
/// autoencoder instead of training one.
pub fn adaptive_configure_with_model(
    iag: &AdjacencyGraph,
    stats: &WindowStats,
    kernel: &KernelParams,
    params: &AdaptiveParams,
    model: &AeModel,
    seed: u64,
) -> Result<Clustering> {
    if model.input_dim != iag.len() {
        return Err(crate::error::Error::ShapeMismatch {
            expected: model.input_dim,
            actual: iag.len(),
        });
    }
    let choice = EmbedChoice::Autoencoder {
        config: AeConfig {
            latent_dim: model.latent_dim,
            seed: model.seed,
            ..AeConfig::default()
        },
        reuse_model: true,
    };
    adaptive_loop(
        iag,
        stats,
        kernel,
        params,
        &choice,
        Some(model.clone()),
        seed,
    )
}

fn adaptive_loop(
    iag: &AdjacencyGraph,
    stats: &WindowStats,
    kernel: &KernelParams,
    params: &AdaptiveParams,
    choice: &EmbedChoice,
    pretrained: Option<AeModel>,
    seed: u64,
) -> Result<Clustering> {
    params.validate()?;
    kernel.validate()?;
    let n = iag.len();
    if n == 0 {
        return Err(invalid("cannot cluster an empty graph"));
    }
    let mut k = n.div_ceil(2);
    let mut round = 0;
    let mut trace = Vec::new();
    let mut reusable = pretrained;
    loop {
        let lambda = params.lambda_at(round);
        let labels = if n == 1 {
            vec![0]
        } else {
            let hag = build_hag(iag, stats, &kernel.with_lambda(lambda)?)?;
            let embedding = match choice {
                EmbedChoice::Spectral { dim } => {
                    spectral_embedding(&hag, dim.unwrap_or(k).clamp(1, n))?
                }
                EmbedChoice::Autoencoder {
                    config,
                    reuse_model,
                } => {
                    let config = AeConfig {
                        latent_dim: config.latent_dim.clamp(1, n - 1),
                        ..*config
                    };
                    let model = match (&reusable, reuse_model) {
                        (Some(model), true) => model.clone(),
                        _ => train_autoencoder(&hag, &config)?,
                    };
                    let embedding = encode(&model, &hag)?;
                    if *reuse_model && reusable.is_none() {
                        reusable = Some(model);
                    }
                    embedding
                }
            };
            kmeans_embedding(&embedding, k, seed)?.labels
        };
        let violations = find_violations(iag, &labels, k, params);
        let done = violations.is_empty() || k >= n;
        trace.push(RoundTrace {
            round,
            k,
            lambda,
            violations,
        });
        if done {
            return Ok(Clustering {
                nodes: iag.nodes.clone(),
                labels,
                k,
                lambda_used: lambda,
                method: choice.method(),
                iterations: round,
                trace,
            });
        }
        k += 1;
        round += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airport::{test_airport, Category};
    use crate::geo::{build_iag, IagParams};
    use crate::stats::AirportLoad;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn column(values: &[f64]) -> Matrix {
        Matrix::from_fn(values.len(), 1, |r, _| values[r])
    }

    /// Minimum SSE over every partition of the rows into exactly `k` non-empty
    /// blocks (restricted-growth-string enumeration).
    fn brute_force_sse(points: &Matrix, k: usize) -> f64 {
        fn rec(points: &Matrix, k: usize, labels: &mut Vec<usize>, used: usize, best: &mut f64) {
            let n = points.rows();
            if labels.len() == n {
                if used == k {
                    *best = best.min(within_cluster_sse(points, labels, k));
                }
                return;
            }
            let remaining = n - labels.len();
            if used + remaining < k {
                return;
            }
            for l in 0..(used + 1).min(k) {
                labels.push(l);
                rec(points, k, labels, used.max(l + 1), best);
                labels.pop();
            }
        }
        let mut best = f64::INFINITY;
        rec(points, k, &mut Vec::new(), 0, &mut best);
        best
    }

    #[test]
    fn separates_two_groups_on_a_line() {
        let pts = column(&[0.0, 1.0, 10.0, 11.0]);
        let out = kmeans(&pts, 2, 0).unwrap();
        assert_eq!(out.labels[0], out.labels[1]);
        assert_eq!(out.labels[2], out.labels[3]);
        assert_ne!(out.labels[0], out.labels[2]);
        // brute force over all 2-partitions gives 0.5 + 0.5
        assert_eq!(brute_force_sse(&pts, 2), 1.0);
        assert!((out.sse() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let pts = column(&[3.0, 3.0, 1.0, 7.0, 3.0]);
        let out = kmeans(&pts, 5, 3).unwrap();
        let mut labels = out.labels.clone();
        labels.sort();
        assert_eq!(labels, vec![0, 1, 2, 3, 4]);
        assert_eq!(out.sse(), 0.0);
    }

    #[test]
    fn k_out_of_range() {
        let pts = column(&[1.0, 2.0]);
        assert!(kmeans(&pts, 0, 0).is_err());
        assert!(kmeans(&pts, 3, 0).is_err());
    }

    #[test]
    fn deterministic_for_same_seed() {
        let pts = Matrix::from_fn(9, 2, |r, c| ((r * 7 + c * 3) % 5) as f64);
        assert_eq!(kmeans(&pts, 3, 11).unwrap(), kmeans(&pts, 3, 11).unwrap());
    }

    #[test]
    fn identical_points_still_fill_every_cluster() {
        let pts = Matrix::zeros(6, 2);
        let out = kmeans(&pts, 4, 0).unwrap();
        let mut used = out.labels.clone();
        used.sort();
        used.dedup();
        assert_eq!(used, vec![0, 1, 2, 3]);
    }

    fn florida_like() -> Registry {
        Registry::new(vec![
            test_airport("MCO", 28.4294, -81.3090, Category::Large),
            test_airport("SFB", 28.7776, -81.2375, Category::Regional),
            test_airport("TPA", 27.9755, -82.5332, Category::Large),
            test_airport("MLB", 28.1028, -80.6453, Category::Regional),
        ])
        .unwrap()
    }

    #[test]
    fn diameter_examples() {
        let r = florida_like();
        let c = |s: &str| AirportCode::new(s).unwrap();
        assert_eq!(cluster_diameter(&[c("MCO")], &r).unwrap(), 0.0);
        let two = cluster_diameter(&[c("MCO"), c("SFB")], &r).unwrap();
        assert!((two - 21.243_105_236_005_05).abs() < 1e-9);
        // TPA-MLB is the longest side; frozen from the same vector-algebra oracle
        let three = cluster_diameter(&[c("MCO"), c("TPA"), c("MLB")], &r).unwrap();
        assert!((three - 100.336_559_757_754_66).abs() < 1e-9);
        assert!(cluster_diameter(&[], &r).is_err());
        assert!(cluster_diameter(&[c("XXX")], &r).is_err());
    }

    #[test]
    fn escalation_bumps_k_and_lambda() {
        let r = florida_like();
        let iag = build_iag(&r, &IagParams::default()).unwrap();
        let stats =
            WindowStats::from_loads(r.codes().into_iter().map(|c| (c, AirportLoad::default())));
        // a cap of one member forces escalation until k = n
        let params = AdaptiveParams {
            max_cluster_size: 1,
            ..AdaptiveParams::default()
        };
        let out = adaptive_configure(
            &iag,
            &stats,
            &KernelParams::default(),
            &params,
            &EmbedChoice::spectral(),
            0,
        )
        .unwrap();
        assert_eq!(out.k, 4);
        assert_eq!(out.trace.len(), 3);
        for pair in out.trace.windows(2) {
            assert!(!pair[0].violations.is_empty());
            assert_eq!(pair[1].k, pair[0].k + 1);
            assert!((pair[1].lambda - pair[0].lambda - 0.1).abs() < 1e-12);
        }
        assert!(out.iterations <= 2);
    }

    #[test]
    fn single_airport_terminates_immediately() {
        let r = Registry::new(vec![test_airport("MCO", 28.4, -81.3, Category::Large)]).unwrap();
        let iag = build_iag(&r, &IagParams::default()).unwrap();
        let stats =
            WindowStats::from_loads(r.codes().into_iter().map(|c| (c, AirportLoad::default())));
        let out = adaptive_configure(
            &iag,
            &stats,
            &KernelParams::default(),
            &AdaptiveParams::default(),
            &EmbedChoice::spectral(),
            0,
        )
        .unwrap();
        assert_eq!((out.k, out.labels.clone()), (1, vec![0]));
    }

    #[test]
    fn lambda_saturates_at_cap() {
        let p = AdaptiveParams::default();
        assert_eq!(p.lambda_at(0), 0.0);
        assert!((p.lambda_at(3) - 0.3).abs() < 1e-15);
        assert_eq!(p.lambda_at(5), 0.5);
        assert_eq!(p.lambda_at(40), 0.5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sse_never_increases(seed in 0u64..10_000, n in 2usize..30, k in 1usize..6) {
            let k = k.min(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts = Matrix::from_fn(n, 3, |_, _| rng.random_range(-5.0..5.0));
            let out = kmeans(&pts, k, seed).unwrap();
            for w in out.sse_log.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9);
            }
            if n <= 7 {
                prop_assert!(out.sse() >= brute_force_sse(&pts, k) - 1e-9);
            }
        }
    }

    #[test]
    fn heuristic_quality_against_brute_force() {
        let mut within = 0;
        for trial in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
            let n = rng.random_range(3..=7);
            let k = rng.random_range(2..=n.min(4));
            let pts = Matrix::from_fn(n, 2, |_, _| rng.random_range(-10.0..10.0));
            let optimal = brute_force_sse(&pts, k);
            let got = kmeans(&pts, k, trial).unwrap().sse();
            assert!(
                got >= optimal - 1e-9,
                "trial {trial}: k-means beat the exhaustive optimum"
            );
            if got <= 1.5 * optimal + 1e-12 {
                within += 1;
            }
        }
        assert!(
            within >= 90,
            "only {within}/100 trials within 1.5x of optimal"
        );
    }
}
