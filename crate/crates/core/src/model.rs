//! A small binary classifier trained with plain SGD: dense input→hidden→scalar
//! with ReLU, sigmoid output, an optional learned input projection added to
//! the hidden activations, and a bit-exact binary checkpoint format.
//!
//! Parameters are `f64` throughout so gradients can be validated against
//! central finite differences and so aggregation math is reproducible to the
//! last bit.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use thiserror::Error;

/// Probability clamp for the cross-entropy loss.
pub const BCE_EPSILON: f64 = 1e-12;

/// Checkpoint magic bytes.
pub const CHECKPOINT_MAGIC: [u8; 4] = *b"FLSL";
/// Checkpoint format version.
pub const CHECKPOINT_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid layer dims {0:?}: expected [input, hidden, 1] with positive entries")]
    InvalidDims(Vec<usize>),
    #[error("feature length {got} does not match model input {expected}")]
    FeatureLenMismatch { expected: usize, got: usize },
    #[error("parameter shapes do not match")]
    ShapeMismatch,
    #[error("empty batch")]
    EmptyBatch,
    #[error("bad checkpoint magic {found:?}")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported checkpoint version {found}")]
    BadVersion { found: u16 },
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
    #[error("truncated checkpoint: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// One dense layer: `rows` outputs over `cols` inputs plus a bias per output.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Layer {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self { weights: Matrix::zeros(rows, cols), bias: vec![0.0; rows] }
    }

    fn param_count(&self) -> usize {
        self.weights.data.len() + self.bias.len()
    }
}

/// The classifier parameters exchanged between clients and server.
///
/// Record layout: `layers[0]` maps input to hidden, `layers[1]` maps hidden
/// to the scalar logit, and an optional `layers[2]` is the input projection
/// added to the hidden activations (same shape as `layers[0]`).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub layers: Vec<Layer>,
}

impl ModelParams {
    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.cols
    }

    pub fn hidden_dim(&self) -> usize {
        self.layers[0].weights.rows
    }

    pub fn residual_enabled(&self) -> bool {
        self.layers.len() == 3
    }

    /// `[input, hidden, 1]`.
    pub fn layer_dims(&self) -> Vec<usize> {
        vec![self.input_dim(), self.hidden_dim(), 1]
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    /// Zero-valued parameters with the same shape.
    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| Layer::zeros(l.weights.rows, l.weights.cols))
                .collect(),
        }
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.layers.len() == other.layers.len()
            && self.layers.iter().zip(&other.layers).all(|(a, b)| {
                a.weights.rows == b.weights.rows && a.weights.cols == b.weights.cols
            })
    }

    /// All parameter values in declaration order (per layer: weights row-major,
    /// then bias).
    pub fn flat_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights.data.iter().chain(l.bias.iter()).copied())
    }

    pub fn flat_values_mut(&mut self) -> impl Iterator<Item = &mut f64> + '_ {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.data.iter_mut().chain(l.bias.iter_mut()))
    }

    /// Flattened copy, used for parameter-space clustering.
    pub fn flatten(&self) -> Vec<f64> {
        self.flat_values().collect()
    }

    /// Exact equality on the underlying bit patterns.
    pub fn bits_eq(&self, other: &Self) -> bool {
        self.same_shape(other)
            && self
                .flat_values()
                .zip(other.flat_values())
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// Serialized checkpoint size in bytes, including the header.
    pub fn checkpoint_len(&self) -> usize {
        4 + 2 + 2 + 8 * self.layers.len() + 8 * self.param_count()
    }
}

/// Architecture settings shared by every client in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ModelConfig {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub residual: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { input_dim: 3072, hidden_dim: 64, residual: false }
    }
}

impl ModelConfig {
    pub fn layer_dims(&self) -> Vec<usize> {
        vec![self.input_dim, self.hidden_dim, 1]
    }

    pub fn init(&self, seed: u64) -> Result<ModelParams, ModelError> {
        init_params(&self.layer_dims(), self.residual, seed)
    }
}

/// Seeded uniform initialization: weights in `±sqrt(6 / fan_in)`, biases zero.
///
/// `dims` must be `[input, hidden, 1]`. Draw order is fixed (layer 0 weights
/// row-major, layer 1 weights, then the projection when enabled) so equal
/// seeds give bit-identical parameters.
pub fn init_params(dims: &[usize], residual: bool, seed: u64) -> Result<ModelParams, ModelError> {
    if dims.len() != 3 || dims.iter().any(|&d| d == 0) || dims[2] != 1 {
        return Err(ModelError::InvalidDims(dims.to_vec()));
    }
    let (input, hidden) = (dims[0], dims[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw_layer = |rows: usize, cols: usize, rng: &mut ChaCha8Rng| {
        let bound = (6.0 / cols as f64).sqrt();
        let data = (0..rows * cols)
            .map(|_| (2.0 * rng.random::<f64>() - 1.0) * bound)
            .collect();
        Layer { weights: Matrix { rows, cols, data }, bias: vec![0.0; rows] }
    };
    let mut layers = vec![draw_layer(hidden, input, &mut rng), draw_layer(1, hidden, &mut rng)];
    if residual {
        layers.push(draw_layer(hidden, input, &mut rng));
    }
    Ok(ModelParams { layers })
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four accumulators give the compiler room to vectorize while keeping a
    // fixed summation order.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let j = i * 4;
        acc[0] += a[j] * b[j];
        acc[1] += a[j + 1] * b[j + 1];
        acc[2] += a[j + 2] * b[j + 2];
        acc[3] += a[j + 3] * b[j + 3];
    }
    let mut tail = 0.0;
    for j in chunks * 4..a.len() {
        tail += a[j] * b[j];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn axpy(target: &mut [f64], alpha: f64, x: &[f64]) {
    for (t, &v) in target.iter_mut().zip(x) {
        *t += alpha * v;
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Forward pass internals needed by the backward pass.
struct ForwardTrace {
    pre_activation: Vec<f64>,
    hidden: Vec<f64>,
    probability: f64,
}

fn forward_trace(params: &ModelParams, features: &[f64]) -> Result<ForwardTrace, ModelError> {
    let input_dim = params.input_dim();
    if features.len() != input_dim {
        return Err(ModelError::FeatureLenMismatch { expected: input_dim, got: features.len() });
    }
    let hidden_layer = &params.layers[0];
    let hidden_dim = hidden_layer.weights.rows;
    let mut pre_activation = Vec::with_capacity(hidden_dim);
    for h in 0..hidden_dim {
        pre_activation.push(dot(hidden_layer.weights.row(h), features) + hidden_layer.bias[h]);
    }
    let mut hidden: Vec<f64> = pre_activation.iter().map(|&a| a.max(0.0)).collect();
    if params.residual_enabled() {
        let proj = &params.layers[2];
        for h in 0..hidden_dim {
            hidden[h] += dot(proj.weights.row(h), features) + proj.bias[h];
        }
    }
    let out = &params.layers[1];
    let logit = dot(out.weights.row(0), &hidden) + out.bias[0];
    Ok(ForwardTrace { pre_activation, hidden, probability: sigmoid(logit) })
}

/// Probability that the lamp is ON for one feature vector.
pub fn forward(params: &ModelParams, features: &[f64]) -> Result<f64, ModelError> {
    forward_trace(params, features).map(|t| t.probability)
}

/// Binary cross-entropy with the probability clamped to
/// `[BCE_EPSILON, 1 - BCE_EPSILON]`; `target` is 1.0 for ON and 0.0 for OFF.
pub fn bce_loss(probability: f64, target: f64) -> f64 {
    let p = probability.clamp(BCE_EPSILON, 1.0 - BCE_EPSILON);
    -(target * p.ln() + (1.0 - target) * (1.0 - p).ln())
}

/// Analytic gradient of the mean cross-entropy over a batch, plus that loss.
///
/// The batch is a slice of `(features, target)` pairs; targets are 0.0/1.0.
pub fn backward(
    params: &ModelParams,
    batch: &[(&[f64], f64)],
) -> Result<(ModelParams, f64), ModelError> {
    if batch.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    let mut grad = params.zeros_like();
    let mut loss_sum = 0.0;
    let hidden_dim = params.hidden_dim();
    let out_weights = params.layers[1].weights.row(0);

    for &(features, target) in batch {
        let trace = forward_trace(params, features)?;
        loss_sum += bce_loss(trace.probability, target);
        // d(loss)/d(logit) for sigmoid + cross-entropy.
        let g_logit = trace.probability - target;

        grad.layers[1].bias[0] += g_logit;
        axpy(grad.layers[1].weights.row_mut(0), g_logit, &trace.hidden);

        for h in 0..hidden_dim {
            let g_hidden = g_logit * out_weights[h];
            if g_hidden == 0.0 {
                continue;
            }
            if params.residual_enabled() {
                axpy(grad.layers[2].weights.row_mut(h), g_hidden, features);
                grad.layers[2].bias[h] += g_hidden;
            }
            if trace.pre_activation[h] > 0.0 {
                axpy(grad.layers[0].weights.row_mut(h), g_hidden, features);
                grad.layers[0].bias[h] += g_hidden;
            }
        }
    }

    let scale = 1.0 / batch.len() as f64;
    for v in grad.flat_values_mut() {
        *v *= scale;
    }
    Ok((grad, loss_sum * scale))
}

/// One gradient-descent update: `p' = p - lr * g`, elementwise.
pub fn sgd_step(params: &ModelParams, grad: &ModelParams, lr: f64) -> Result<ModelParams, ModelError> {
    let mut next = params.clone();
    sgd_step_in_place(&mut next, grad, lr)?;
    Ok(next)
}

/// In-place variant used by the training loops.
pub fn sgd_step_in_place(
    params: &mut ModelParams,
    grad: &ModelParams,
    lr: f64,
) -> Result<(), ModelError> {
    if !params.same_shape(grad) {
        return Err(ModelError::ShapeMismatch);
    }
    for (p, g) in params.flat_values_mut().zip(grad.flat_values()) {
        *p -= lr * g;
    }
    Ok(())
}

/// Serializes parameters to the wire/checkpoint encoding.
///
/// Layout: magic `FLSL`, version u16, layer count u16, per layer
/// (u32 rows, u32 cols), then every layer's weights (row-major) and bias as
/// little-endian f64, no padding.
pub fn encode_params(params: &ModelParams) -> Vec<u8> {
    let mut out = Vec::with_capacity(params.checkpoint_len());
    out.extend_from_slice(&CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(params.layers.len() as u16).to_le_bytes());
    for layer in &params.layers {
        out.extend_from_slice(&(layer.weights.rows as u32).to_le_bytes());
        out.extend_from_slice(&(layer.weights.cols as u32).to_le_bytes());
    }
    for layer in &params.layers {
        for v in layer.weights.data.iter().chain(layer.bias.iter()) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Parses the encoding produced by [`encode_params`].
pub fn decode_params(bytes: &[u8]) -> Result<ModelParams, ModelError> {
    if bytes.len() < 8 {
        return Err(ModelError::Truncated { expected: 8, got: bytes.len() });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != CHECKPOINT_MAGIC {
        return Err(ModelError::BadMagic { found: magic });
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(ModelError::BadVersion { found: version });
    }
    let layer_count = u16::from_le_bytes(bytes[6..8].try_into().unwrap()) as usize;
    if !(2..=3).contains(&layer_count) {
        return Err(ModelError::Corrupt(format!("unsupported layer count {layer_count}")));
    }

    let dims_end = 8 + 8 * layer_count;
    if bytes.len() < dims_end {
        return Err(ModelError::Truncated { expected: dims_end, got: bytes.len() });
    }
    let mut shapes = Vec::with_capacity(layer_count);
    for i in 0..layer_count {
        let at = 8 + 8 * i;
        let rows = u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(bytes[at + 4..at + 8].try_into().unwrap()) as usize;
        if rows == 0 || cols == 0 {
            return Err(ModelError::Corrupt(format!("zero dimension in layer {i}")));
        }
        shapes.push((rows, cols));
    }
    if shapes[1] != (1, shapes[0].0) {
        return Err(ModelError::Corrupt("output layer does not match hidden layer".into()));
    }
    if layer_count == 3 && shapes[2] != shapes[0] {
        return Err(ModelError::Corrupt("projection does not match hidden layer shape".into()));
    }

    let param_count: usize = shapes.iter().map(|&(r, c)| r * c + r).sum();
    let expected = dims_end + 8 * param_count;
    if bytes.len() != expected {
        return Err(ModelError::Truncated { expected, got: bytes.len() });
    }

    let mut at = dims_end;
    let read_f64 = |at: &mut usize| {
        let v = f64::from_le_bytes(bytes[*at..*at + 8].try_into().unwrap());
        *at += 8;
        v
    };
    let mut layers = Vec::with_capacity(layer_count);
    for &(rows, cols) in &shapes {
        let data: Vec<f64> = (0..rows * cols).map(|_| read_f64(&mut at)).collect();
        let bias: Vec<f64> = (0..rows).map(|_| read_f64(&mut at)).collect();
        layers.push(Layer { weights: Matrix { rows, cols, data }, bias });
    }
    Ok(ModelParams { layers })
}

/// Writes a checkpoint file.
pub fn save_params(params: &ModelParams, path: &Path) -> Result<(), ModelError> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode_params(params))?;
    Ok(())
}

/// Reads a checkpoint file.
pub fn load_params(path: &Path) -> Result<ModelParams, ModelError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_params(&bytes)
}
