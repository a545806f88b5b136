//! Low-dimensional embeddings of the weighted adjacency matrix.
//!
//! Two paths compress each airport's adjacency row:
//!
//! * **Spectral**: eigenvectors of the graph Laplacian `L = D - W` for the
//!   smallest eigenvalues (Jacobi eigendecomposition, recomputed every call).
//! * **Autoencoder**: one dense encoder layer `n -> h` with a rectifier and one
//!   dense linear decoder `h -> n`, trained by full-batch gradient descent on
//!   the standardized rows. Once trained, encoding is a single affine map.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::airport::AirportCode;
use crate::error::{invalid, Error, Result};
use crate::graph::HybridGraph;
use crate::linalg::{symmetric_eigen, Matrix, SymmetricEigen};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingMethod {
    Spectral,
    Autoencoder,
}

/// Row `i` of `vectors` embeds `nodes[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub nodes: Vec<AirportCode>,
    pub vectors: Matrix,
    pub method: EmbeddingMethod,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianKind {
    /// `L = D - W`
    #[default]
    Unnormalized,
    /// `I - D^{-1/2} W D^{-1/2}`; isolated nodes get a unit diagonal.
    SymmetricNormalized,
}

pub fn laplacian(weights: &Matrix, kind: LaplacianKind) -> Matrix {
    let n = weights.rows();
    let degree: Vec<f64> = (0..n).map(|i| weights.row(i).iter().sum()).collect();
    match kind {
        LaplacianKind::Unnormalized => Matrix::from_fn(n, n, |i, j| {
            if i == j {
                degree[i] - weights[(i, i)]
            } else {
                -weights[(i, j)]
            }
        }),
        LaplacianKind::SymmetricNormalized => {
            let inv_sqrt: Vec<f64> = degree
                .iter()
                .map(|&d| if d > 0.0 { 1.0 / libm::sqrt(d) } else { 0.0 })
                .collect();
            Matrix::from_fn(n, n, |i, j| {
                let scaled = inv_sqrt[i] * weights[(i, j)] * inv_sqrt[j];
                if i == j {
                    1.0 - scaled
                } else {
                    -scaled
                }
            })
        }
    }
}

/// Full eigendecomposition of the HAG Laplacian, ascending eigenvalues.
pub fn laplacian_spectrum(hag: &HybridGraph, kind: LaplacianKind) -> Result<SymmetricEigen> {
    symmetric_eigen(&laplacian(&hag.weights, kind))
}

pub fn spectral_embedding(hag: &HybridGraph, dim: usize) -> Result<Embedding> {
    spectral_embedding_with(hag, dim, LaplacianKind::Unnormalized)
}

pub fn spectral_embedding_with(
    hag: &HybridGraph,
    dim: usize,
    kind: LaplacianKind,
) -> Result<Embedding> {
    let n = hag.len();
    if dim == 0 || dim > n {
        return Err(invalid(format!(
            "embedding dimension must be in [1, {n}], got {dim}"
        )));
    }
    let eig = laplacian_spectrum(hag, kind)?;
    let cols: Vec<usize> = (0..dim).collect();
    Ok(Embedding {
        nodes: hag.nodes().to_vec(),
        vectors: eig.vectors.select_columns(&cols),
        method: EmbeddingMethod::Spectral,
        dim,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AeConfig {
    pub latent_dim: usize,
    pub epochs: usize,
    pub step_size: f64,
    pub seed: u64,
}

impl Default for AeConfig {
    fn default() -> Self {
        Self {
            latent_dim: 10,
            epochs: 2000,
            step_size: 1e-2,
            seed: 0,
        }
    }
}

/// Trained autoencoder with the column standardization it was fitted on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeModel {
    pub input_dim: usize,
    pub latent_dim: usize,
    /// `latent_dim × input_dim`
    pub encoder_weights: Matrix,
    pub encoder_bias: Vec<f64>,
    /// `input_dim × latent_dim`
    pub decoder_weights: Matrix,
    pub decoder_bias: Vec<f64>,
    pub scale_mean: Vec<f64>,
    pub scale_std: Vec<f64>,
    pub seed: u64,
    /// Mean squared reconstruction error at the start of each epoch.
    pub training_log: Vec<f64>,
}

struct Standardizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Standardizer {
    fn fit(x: &Matrix) -> Self {
        let (n, m) = (x.rows(), x.cols());
        let mut mean = vec![0.0; m];
        let mut std = vec![0.0; m];
        for c in 0..m {
            let mu = (0..n).map(|r| x[(r, c)]).sum::<f64>() / n as f64;
            let var = (0..n)
                .map(|r| (x[(r, c)] - mu) * (x[(r, c)] - mu))
                .sum::<f64>()
                / n as f64;
            let sd = libm::sqrt(var);
            mean[c] = mu;
            std[c] = if sd > 1e-12 { sd } else { 1.0 };
        }
        Self { mean, std }
    }
}

fn standardize(x: &Matrix, mean: &[f64], std: &[f64]) -> Matrix {
    Matrix::from_fn(x.rows(), x.cols(), |r, c| (x[(r, c)] - mean[c]) / std[c])
}

impl AeModel {
    fn init(input_dim: usize, config: &AeConfig, scaler: Standardizer) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let h = config.latent_dim;
        let limit = libm::sqrt(6.0 / (input_dim + h) as f64);
        let encoder_weights = Matrix::from_fn(h, input_dim, |_, _| rng.random_range(-limit..limit));
        let decoder_weights = Matrix::from_fn(input_dim, h, |_, _| rng.random_range(-limit..limit));
        Self {
            input_dim,
            latent_dim: h,
            encoder_weights,
            encoder_bias: vec![0.0; h],
            decoder_weights,
            decoder_bias: vec![0.0; input_dim],
            scale_mean: scaler.mean,
            scale_std: scaler.std,
            seed: config.seed,
            training_log: Vec::new(),
        }
    }

    /// Pre-activation and rectified latent codes for standardized rows.
    fn forward_encoder(&self, x: &Matrix) -> (Matrix, Matrix) {
        let (n, h) = (x.rows(), self.latent_dim);
        let mut z = Matrix::zeros(n, h);
        for r in 0..n {
            let row = x.row(r);
            for k in 0..h {
                let w = self.encoder_weights.row(k);
                z[(r, k)] =
                    self.encoder_bias[k] + row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        let mut a = z.clone();
        for r in 0..n {
            for v in a.row_mut(r) {
                *v = v.max(0.0);
            }
        }
        (z, a)
    }

    fn forward_decoder(&self, a: &Matrix) -> Matrix {
        let (n, m) = (a.rows(), self.input_dim);
        let mut y = Matrix::zeros(n, m);
        for r in 0..n {
            let code = a.row(r);
            for c in 0..m {
                let w = self.decoder_weights.row(c);
                y[(r, c)] =
                    self.decoder_bias[c] + code.iter().zip(w).map(|(p, q)| p * q).sum::<f64>();
            }
        }
        y
    }

    /// One full-batch gradient step; returns the loss before the step.
    fn step(&mut self, x: &Matrix, lr: f64) -> f64 {
        let (n, m, h) = (x.rows(), self.input_dim, self.latent_dim);
        let (z, a) = self.forward_encoder(x);
        let y = self.forward_decoder(&a);
        let count = (n * m) as f64;

        let mut loss = 0.0;
        let mut dy = Matrix::zeros(n, m);
        for r in 0..n {
            for c in 0..m {
                let e = y[(r, c)] - x[(r, c)];
                loss += e * e;
                dy[(r, c)] = 2.0 * e / count;
            }
        }
        loss /= count;

        // decoder gradients and back-propagated latent gradient
        let mut dw2 = Matrix::zeros(m, h);
        let mut db2 = vec![0.0; m];
        let mut dz = Matrix::zeros(n, h);
        for r in 0..n {
            for c in 0..m {
                let g = dy[(r, c)];
                if g == 0.0 {
                    continue;
                }
                db2[c] += g;
                for k in 0..h {
                    dw2[(c, k)] += g * a[(r, k)];
                    dz[(r, k)] += g * self.decoder_weights[(c, k)];
                }
            }
            for k in 0..h {
                if z[(r, k)] <= 0.0 {
                    dz[(r, k)] = 0.0;
                }
            }
        }
        let mut dw1 = Matrix::zeros(h, m);
        let mut db1 = vec![0.0; h];
        for r in 0..n {
            for k in 0..h {
                let g = dz[(r, k)];
                if g == 0.0 {
                    continue;
                }
                db1[k] += g;
                for c in 0..m {
                    dw1[(k, c)] += g * x[(r, c)];
                }
            }
        }

        for k in 0..h {
            for c in 0..m {
                self.encoder_weights[(k, c)] -= lr * dw1[(k, c)];
                self.decoder_weights[(c, k)] -= lr * dw2[(c, k)];
            }
            self.encoder_bias[k] -= lr * db1[k];
        }
        for c in 0..m {
            self.decoder_bias[c] -= lr * db2[c];
        }
        loss
    }

    fn check_shape(&self, hag: &HybridGraph) -> Result<()> {
        if hag.len() != self.input_dim {
            return Err(Error::ShapeMismatch {
                expected: self.input_dim,
                actual: hag.len(),
            });
        }
        Ok(())
    }

    /// Mean squared reconstruction error of `hag`'s rows under this model.
    pub fn reconstruction_loss(&self, hag: &HybridGraph) -> Result<f64> {
        self.check_shape(hag)?;
        let x = standardize(&hag.weights, &self.scale_mean, &self.scale_std);
        let (_, a) = self.forward_encoder(&x);
        let y = self.forward_decoder(&a);
        let count = (x.rows() * x.cols()).max(1) as f64;
        let sse: f64 = x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(p, q)| (p - q) * (p - q))
            .sum();
        Ok(sse / count)
    }
}

/// Train an autoencoder on the rows of the HAG adjacency matrix.
///
/// Deterministic for a given seed. Fails with [`Error::NonConvergent`] if the
/// last epoch's loss is above the first epoch's.
pub fn train_autoencoder(hag: &HybridGraph, config: &AeConfig) -> Result<AeModel> {
    let n = hag.len();
    if config.latent_dim == 0 || config.latent_dim >= n {
        return Err(invalid(format!(
            "latent dimension must be in [1, {}), got {}",
            n, config.latent_dim
        )));
    }
    if config.epochs == 0 {
        return Err(invalid("autoencoder needs at least one epoch"));
    }
    if !(config.step_size > 0.0 && config.step_size.is_finite()) {
        return Err(invalid(format!(
            "step size must be positive, got {}",
            config.step_size
        )));
    }
    let scaler = Standardizer::fit(&hag.weights);
    let x = standardize(&hag.weights, &scaler.mean, &scaler.std);
    let mut model = AeModel::init(n, config, scaler);
    let mut log = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        log.push(model.step(&x, config.step_size));
    }
    let (first, last) = (log[0], log[log.len() - 1]);
    if !(last <= first) {
        return Err(Error::NonConvergent { first, last, log });
    }
    model.training_log = log;
    Ok(model)
}

/// Encode each adjacency row with a trained model.
pub fn encode(model: &AeModel, hag: &HybridGraph) -> Result<Embedding> {
    model.check_shape(hag)?;
    let x = standardize(&hag.weights, &model.scale_mean, &model.scale_std);
    let (_, vectors) = model.forward_encoder(&x);
    Ok(Embedding {
        nodes: hag.nodes().to_vec(),
        vectors,
        method: EmbeddingMethod::Autoencoder,
        dim: model.latent_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::{AdjacencyGraph, GeoPoint};
    use crate::graph::KernelParams;
    use alloc::collections::BTreeSet;
    use alloc::string::String;
    use proptest::prelude::*;
    use rand::Rng;

    fn hag_from(weights: Matrix) -> HybridGraph {
        let n = weights.rows();
        let nodes = (0..n)
            .map(|i| AirportCode::new(&alloc::format!("N{i:02}")).unwrap())
            .collect();
        let mut edges = BTreeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if weights[(i, j)] != 0.0 {
                    edges.insert((i, j));
                }
            }
        }
        HybridGraph {
            graph: AdjacencyGraph {
                nodes,
                positions: vec![GeoPoint::new(0.0, 0.0); n],
                edges,
            },
            weights,
            params: KernelParams::default(),
            stats_fingerprint: String::new(),
        }
    }

    fn unit_graph(n: usize, edges: &[(usize, usize)]) -> HybridGraph {
        let mut w = Matrix::zeros(n, n);
        for &(i, j) in edges {
            w[(i, j)] = 1.0;
            w[(j, i)] = 1.0;
        }
        hag_from(w)
    }

    #[test]
    fn triangle_spectrum() {
        // K3 Laplacian = 3I - J: eigenvalue 0 on the all-ones vector, 3 on its complement
        let eig = laplacian_spectrum(
            &unit_graph(3, &[(0, 1), (1, 2), (0, 2)]),
            LaplacianKind::Unnormalized,
        )
        .unwrap();
        for (got, want) in eig.values.iter().zip([0.0, 3.0, 3.0]) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn path_spectrum() {
        // P3 Laplacian [[1,-1,0],[-1,2,-1],[0,-1,1]]: characteristic polynomial -x(x-1)(x-3)
        let eig = laplacian_spectrum(
            &unit_graph(3, &[(0, 1), (1, 2)]),
            LaplacianKind::Unnormalized,
        )
        .unwrap();
        for (got, want) in eig.values.iter().zip([0.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn two_components_share_null_space_rows() {
        let hag = unit_graph(4, &[(0, 1), (2, 3)]);
        let eig = laplacian_spectrum(&hag, LaplacianKind::Unnormalized).unwrap();
        assert!(eig.values[0].abs() < 1e-10 && eig.values[1].abs() < 1e-10);
        assert!(eig.values[2] > 1e-6);
        let emb = spectral_embedding(&hag, 2).unwrap();
        let same = |a: usize, b: usize| {
            (0..2).all(|c| (emb.vectors[(a, c)] - emb.vectors[(b, c)]).abs() < 1e-10)
        };
        assert!(same(0, 1) && same(2, 3) && !same(0, 2));
    }

    #[test]
    fn spectral_dim_bounds() {
        let hag = unit_graph(3, &[(0, 1)]);
        assert!(spectral_embedding(&hag, 0).is_err());
        assert!(spectral_embedding(&hag, 4).is_err());
        let emb = spectral_embedding(&hag, 3).unwrap();
        assert_eq!((emb.vectors.rows(), emb.vectors.cols(), emb.dim), (3, 3, 3));
    }

    #[test]
    fn normalized_laplacian_spectrum_in_range() {
        let hag = unit_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        let eig = laplacian_spectrum(&hag, LaplacianKind::SymmetricNormalized).unwrap();
        assert!(eig.values[0].abs() < 1e-10);
        assert!(eig.values.iter().all(|&v| v > -1e-10 && v < 2.0 + 1e-10));
    }

    fn weighted_ring(n: usize) -> HybridGraph {
        let mut w = Matrix::zeros(n, n);
        for i in 0..n {
            let j = (i + 1) % n;
            let v = 1.0 + (i % 5) as f64 * 3.7;
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
        hag_from(w)
    }

    #[test]
    fn autoencoder_trains_and_is_deterministic() {
        let hag = weighted_ring(12);
        let config = AeConfig {
            latent_dim: 4,
            epochs: 300,
            seed: 7,
            ..AeConfig::default()
        };
        let a = train_autoencoder(&hag, &config).unwrap();
        let b = train_autoencoder(&hag, &config).unwrap();
        assert_eq!(a.training_log.len(), 300);
        let bits = |m: &AeModel| {
            m.training_log
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
        assert!(a.training_log.last().unwrap() < &a.training_log[0]);

        let e1 = encode(&a, &hag).unwrap();
        let e2 = encode(&a, &hag).unwrap();
        assert_eq!(e1, e2);
        assert_eq!((e1.vectors.rows(), e1.vectors.cols()), (12, 4));
        assert!(e1.vectors.as_slice().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn constant_rows_reconstruct_exactly() {
        let hag = hag_from(Matrix::from_fn(6, 6, |_, _| 2.5));
        let model = train_autoencoder(
            &hag,
            &AeConfig {
                latent_dim: 2,
                epochs: 50,
                ..AeConfig::default()
            },
        )
        .unwrap();
        assert!(*model.training_log.last().unwrap() < 1e-12);
        let emb = encode(&model, &hag).unwrap();
        for r in 1..6 {
            for c in 0..2 {
                assert!((emb.vectors[(r, c)] - emb.vectors[(0, c)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn autoencoder_argument_errors() {
        let hag = weighted_ring(5);
        let bad_latent = AeConfig {
            latent_dim: 5,
            ..AeConfig::default()
        };
        assert!(train_autoencoder(&hag, &bad_latent).is_err());
        let no_epochs = AeConfig {
            latent_dim: 2,
            epochs: 0,
            ..AeConfig::default()
        };
        assert!(train_autoencoder(&hag, &no_epochs).is_err());
    }

    #[test]
    fn divergent_training_is_reported() {
        let hag = weighted_ring(8);
        let config = AeConfig {
            latent_dim: 3,
            epochs: 20,
            step_size: 50.0,
            seed: 1,
        };
        match train_autoencoder(&hag, &config) {
            Err(Error::NonConvergent { log, first, last }) => {
                assert_eq!(log.len(), 20);
                assert!(last > first || last.is_nan());
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn encode_rejects_wrong_node_count() {
        let model = train_autoencoder(
            &weighted_ring(6),
            &AeConfig {
                latent_dim: 2,
                epochs: 5,
                ..AeConfig::default()
            },
        )
        .unwrap();
        let err = encode(&model, &weighted_ring(7)).unwrap_err();
        assert_eq!(
            err,
            Error::ShapeMismatch {
                expected: 6,
                actual: 7
            }
        );
    }

    #[test]
    fn model_round_trips_through_json() {
        let hag = weighted_ring(6);
        let model = train_autoencoder(
            &hag,
            &AeConfig {
                latent_dim: 2,
                epochs: 10,
                ..AeConfig::default()
            },
        )
        .unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: AeModel = serde_json::from_str(&json).unwrap();
        assert_eq!(encode(&back, &hag).unwrap(), encode(&model, &hag).unwrap());
    }

    fn permute(hag: &HybridGraph, perm: &[usize]) -> HybridGraph {
        let n = hag.len();
        let w = Matrix::from_fn(n, n, |i, j| hag.weights[(perm[i], perm[j])]);
        hag_from(w)
    }

    // P = V Vᵀ restricted to the embedding columns; invariant to rotations within the subspace
    fn projector(emb: &Embedding) -> Matrix {
        emb.vectors.matmul(&emb.vectors.transpose())
    }

    proptest! {
        #[test]
        fn spectral_projector_permutes_with_nodes(
            weights in proptest::collection::vec(0.5..20.0f64, 64),
            seed in 0u64..1000,
        ) {
            let n = 8;
            // ring plus a chord guarantees connectivity and a simple smallest eigenvalue
            let mut w = Matrix::zeros(n, n);
            for i in 0..n {
                let j = (i + 1) % n;
                w[(i, j)] = weights[i];
                w[(j, i)] = weights[i];
            }
            w[(0, 4)] = weights[10];
            w[(4, 0)] = weights[10];
            let hag = hag_from(w);
            let mut perm: Vec<usize> = (0..n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let eig = laplacian_spectrum(&hag, LaplacianKind::Unnormalized).unwrap();
            // compare only when the chosen subspace is separated from the rest
            prop_assume!(eig.values[3] - eig.values[2] > 1e-6);
            let p = projector(&spectral_embedding(&hag, 3).unwrap());
            let q = projector(&spectral_embedding(&permute(&hag, &perm), 3).unwrap());
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((q[(i, j)] - p[(perm[i], perm[j])]).abs() < 1e-8);
                }
            }
        }

        #[test]
        fn encode_permutes_with_nodes(seed in 0u64..50) {
            let hag = weighted_ring(7);
            let model = train_autoencoder(&hag, &AeConfig { latent_dim: 3, epochs: 30, seed, ..AeConfig::default() }).unwrap();
            let perm = [3usize, 0, 6, 1, 5, 2, 4];
            let permuted = permute(&hag, &perm);
            // permuting nodes permutes both rows and columns, so the model's
            // input scaling and first-layer weights must be permuted too
            let mut pm = model.clone();
            pm.scale_mean = perm.iter().map(|&p| model.scale_mean[p]).collect();
            pm.scale_std = perm.iter().map(|&p| model.scale_std[p]).collect();
            pm.encoder_weights = Matrix::from_fn(3, 7, |k, c| model.encoder_weights[(k, perm[c])]);
            let a = encode(&model, &hag).unwrap();
            let b = encode(&pm, &permuted).unwrap();
            for i in 0..7 {
                for k in 0..3 {
                    prop_assert!((b.vectors[(i, k)] - a.vectors[(perm[i], k)]).abs() < 1e-9);
                }
            }
        }
    }
}
