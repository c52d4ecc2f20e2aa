//! Convolutional text model: trainable embeddings, one bank of filters per
//! window size, max-pooling over positions, ReLU, dropout and a linear head.
//!
//! The same [`ConvNet`] backs the effort regressor (one output, squared
//! error) and the SATD classifier (five outputs, softmax cross-entropy).
//! Gradients are computed by hand; `tests::finite_difference_gradients`
//! checks them against central differences.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::features::{encode_sequence, tokenize, Vocabulary, PAD};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnnHyper {
    pub embed_dim: usize,
    pub window_sizes: Vec<usize>,
    pub filters_per_window: usize,
    pub dropout: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Longer messages are truncated to this many tokens.
    pub max_len: usize,
    /// Vocabulary frequency cutoff.
    pub min_freq: usize,
}

impl Default for CnnHyper {
    fn default() -> Self {
        Self {
            embed_dim: 300,
            window_sizes: vec![1, 2, 3, 4, 5],
            filters_per_window: 200,
            dropout: 0.5,
            learning_rate: 1e-3,
            epochs: 30,
            batch_size: 64,
            seed: 0,
            max_len: 100,
            min_freq: 1,
        }
    }
}

impl CnnHyper {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: &str| Err(ModelError::InvalidHyper(msg.to_string()));
        if self.window_sizes.is_empty() || self.window_sizes.contains(&0) {
            return bad("window_sizes must be non-empty and positive");
        }
        if self.filters_per_window == 0 || self.embed_dim == 0 {
            return bad("filters_per_window and embed_dim must be at least 1");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout must be in [0, 1)");
        }
        if self.batch_size == 0 || self.learning_rate <= 0.0 || self.max_len == 0 {
            return bad("batch_size, learning_rate and max_len must be positive");
        }
        Ok(())
    }

    pub fn max_window(&self) -> usize {
        self.window_sizes.iter().copied().max().unwrap_or(1)
    }
}

/// Network parameters, stored flat so the optimizer and gradient checks can
/// treat them uniformly. Layout: embedding, conv weights per window, conv
/// biases per window, output weights, output biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvNet {
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub windows: Vec<usize>,
    pub filters: usize,
    pub outputs: usize,
    pub params: Vec<f64>,
}

/// Forward-pass record for one sequence.
#[derive(Debug, Clone)]
pub struct Trace {
    /// Max over positions of each filter's response, before ReLU.
    pub pooled_raw: Vec<f64>,
    /// ReLU of `pooled_raw`: the features seen by the output layer.
    pub pooled: Vec<f64>,
    /// Position achieving the max, per feature.
    pub argmax: Vec<usize>,
    pub output: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Layout {
    conv_w: usize,
    conv_b: usize,
    out_w: usize,
    out_b: usize,
    total: usize,
}

impl ConvNet {
    pub fn new(
        vocab_size: usize,
        embed_dim: usize,
        windows: Vec<usize>,
        filters: usize,
        outputs: usize,
    ) -> Self {
        let mut net = Self {
            vocab_size,
            embed_dim,
            windows,
            filters,
            outputs,
            params: Vec::new(),
        };
        net.params = vec![0.0; net.layout().total];
        net
    }

    /// Uniform initialization: embeddings in ±0.05, layers in ±1/sqrt(fan_in).
    pub fn initialize(&mut self, rng: &mut impl Rng) {
        let d = self.embed_dim;
        for (k, v) in self.embedding_mut().iter_mut().enumerate() {
            *v = if k < d {
                0.0
            } else {
                rng.random_range(-0.05..0.05)
            };
        }
        for wi in 0..self.windows.len() {
            let bound = 1.0 / ((self.windows[wi] * d) as f64).sqrt();
            for v in self.conv_weights_mut(wi) {
                *v = rng.random_range(-bound..bound);
            }
            for v in self.conv_bias_mut(wi) {
                *v = rng.random_range(-bound..bound);
            }
        }
        let bound = 1.0 / (self.features() as f64).sqrt();
        let (out_w, out_b) = (self.layout().out_w, self.layout().out_b);
        for v in &mut self.params[out_w..out_b] {
            *v = rng.random_range(-bound..bound);
        }
        for v in &mut self.params[out_b..] {
            *v = 0.0;
        }
    }

    fn layout(&self) -> Layout {
        let conv_w = self.vocab_size * self.embed_dim;
        let conv_b = conv_w
            + self
                .windows
                .iter()
                .map(|w| w * self.embed_dim * self.filters)
                .sum::<usize>();
        let out_w = conv_b + self.windows.len() * self.filters;
        let out_b = out_w + self.outputs * self.features();
        Layout {
            conv_w,
            conv_b,
            out_w,
            out_b,
            total: out_b + self.outputs,
        }
    }

    /// Length of the pooled feature vector.
    pub fn features(&self) -> usize {
        self.windows.len() * self.filters
    }

    pub fn max_window(&self) -> usize {
        self.windows.iter().copied().max().unwrap_or(1)
    }

    fn conv_w_offset(&self, wi: usize) -> usize {
        self.layout().conv_w
            + self.windows[..wi]
                .iter()
                .map(|w| w * self.embed_dim * self.filters)
                .sum::<usize>()
    }

    fn embedding_mut(&mut self) -> &mut [f64] {
        let end = self.layout().conv_w;
        &mut self.params[..end]
    }

    fn conv_weights_mut(&mut self, wi: usize) -> &mut [f64] {
        let start = self.conv_w_offset(wi);
        let len = self.windows[wi] * self.embed_dim * self.filters;
        &mut self.params[start..start + len]
    }

    fn conv_bias_mut(&mut self, wi: usize) -> &mut [f64] {
        let start = self.layout().conv_b + wi * self.filters;
        let len = self.filters;
        &mut self.params[start..start + len]
    }

    /// Output weights, row-major `outputs x features`.
    pub fn output_weights(&self) -> &[f64] {
        let l = self.layout();
        &self.params[l.out_w..l.out_b]
    }

    pub fn output_bias(&self) -> &[f64] {
        &self.params[self.layout().out_b..]
    }

    pub fn output_weights_mut(&mut self) -> &mut [f64] {
        let l = self.layout();
        &mut self.params[l.out_w..l.out_b]
    }

    pub fn output_bias_mut(&mut self) -> &mut [f64] {
        let start = self.layout().out_b;
        &mut self.params[start..]
    }

    pub fn embedding_row_mut(&mut self, token: u32) -> &mut [f64] {
        let d = self.embed_dim;
        let start = token as usize * d;
        &mut self.params[start..start + d]
    }

    /// Weights of filter `f` in window bank `wi`, laid out offset-major
    /// (`w * embed_dim` values).
    pub fn filter_mut(&mut self, wi: usize, f: usize) -> &mut [f64] {
        let len = self.windows[wi] * self.embed_dim;
        let start = self.conv_w_offset(wi) + f * len;
        &mut self.params[start..start + len]
    }

    pub fn filter_bias_mut(&mut self, wi: usize, f: usize) -> &mut f64 {
        let idx = self.layout().conv_b + wi * self.filters + f;
        &mut self.params[idx]
    }

    /// Map a pooled feature index to `(window bank, filter)`.
    pub fn feature_origin(&self, feature: usize) -> (usize, usize) {
        (feature / self.filters, feature % self.filters)
    }

    /// Forward pass without dropout.
    pub fn forward(&self, seq: &[u32]) -> Trace {
        self.forward_with_mask(seq, None)
    }

    /// Squared error of output 0 against `target` and its gradient with
    /// respect to [`ConvNet::params`], dropout disabled.
    pub fn squared_error_gradient(&self, seq: &[u32], target: f64) -> (f64, Vec<f64>) {
        self.loss_gradient(seq, Objective::Regression(&[target]))
    }

    /// Softmax cross-entropy against `class` and its gradient.
    pub fn cross_entropy_gradient(&self, seq: &[u32], class: usize) -> (f64, Vec<f64>) {
        self.loss_gradient(seq, Objective::Classification(&[class]))
    }

    fn loss_gradient(&self, seq: &[u32], obj: Objective<'_>) -> (f64, Vec<f64>) {
        let trace = self.forward(seq);
        let mut d_out = vec![0.0; self.outputs];
        let loss = obj.loss_and_grad(0, &trace.output, &mut d_out);
        let mut grad = vec![0.0; self.params.len()];
        self.backward(seq, &trace, None, &d_out, &mut grad);
        (loss, grad)
    }

    fn forward_with_mask(&self, seq: &[u32], mask: Option<&[f64]>) -> Trace {
        let d = self.embed_dim;
        let l = self.layout();
        let n_feat = self.features();
        let mut pooled_raw = vec![f64::NEG_INFINITY; n_feat];
        let mut argmax = vec![0usize; n_feat];
        let mut window_input = Vec::new();

        for (wi, &w) in self.windows.iter().enumerate() {
            let w_off = self.conv_w_offset(wi);
            let b_off = l.conv_b + wi * self.filters;
            let span = w * d;
            let positions = seq.len() + 1 - w.min(seq.len() + 1);
            for p in 0..positions {
                window_input.clear();
                for &tok in &seq[p..p + w] {
                    let t = tok as usize;
                    window_input.extend_from_slice(&self.params[t * d..(t + 1) * d]);
                }
                for f in 0..self.filters {
                    let weights = &self.params[w_off + f * span..w_off + (f + 1) * span];
                    let z = self.params[b_off + f] + dot(weights, &window_input);
                    let slot = wi * self.filters + f;
                    if z > pooled_raw[slot] {
                        pooled_raw[slot] = z;
                        argmax[slot] = p;
                    }
                }
            }
        }

        let pooled: Vec<f64> = pooled_raw.iter().map(|&z| z.max(0.0)).collect();
        let out_w = &self.params[l.out_w..l.out_b];
        let out_b = &self.params[l.out_b..];
        let output = (0..self.outputs)
            .map(|k| {
                let row = &out_w[k * n_feat..(k + 1) * n_feat];
                let h = pooled.iter().enumerate().map(|(j, &h)| match mask {
                    Some(m) => h * m[j],
                    None => h,
                });
                out_b[k] + row.iter().zip(h).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect();
        Trace {
            pooled_raw,
            pooled,
            argmax,
            output,
        }
    }

    /// Accumulate into `grad` the gradient of the loss whose derivative with
    /// respect to the outputs is `d_out`.
    fn backward(
        &self,
        seq: &[u32],
        trace: &Trace,
        mask: Option<&[f64]>,
        d_out: &[f64],
        grad: &mut [f64],
    ) {
        let d = self.embed_dim;
        let l = self.layout();
        let n_feat = self.features();
        let out_w = &self.params[l.out_w..l.out_b];

        let mut d_pooled = vec![0.0; n_feat];
        for k in 0..self.outputs {
            let g = d_out[k];
            if g == 0.0 {
                continue;
            }
            grad[l.out_b + k] += g;
            let row_off = l.out_w + k * n_feat;
            for j in 0..n_feat {
                let m = mask.map_or(1.0, |m| m[j]);
                grad[row_off + j] += g * trace.pooled[j] * m;
                d_pooled[j] += g * out_w[k * n_feat + j] * m;
            }
        }

        for (wi, &w) in self.windows.iter().enumerate() {
            let w_off = self.conv_w_offset(wi);
            let span = w * d;
            for f in 0..self.filters {
                let slot = wi * self.filters + f;
                // ReLU gate on the pooled response.
                if trace.pooled_raw[slot] <= 0.0 || d_pooled[slot] == 0.0 {
                    continue;
                }
                let g = d_pooled[slot];
                let p = trace.argmax[slot];
                grad[l.conv_b + slot] += g;
                let filt = w_off + f * span;
                for (k, &tok) in seq[p..p + w].iter().enumerate() {
                    let t = tok as usize;
                    for c in 0..d {
                        grad[filt + k * d + c] += g * self.params[t * d + c];
                        if tok != PAD {
                            grad[t * d + c] += g * self.params[filt + k * d + c];
                        }
                    }
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Training targets for [`train_network`].
#[derive(Debug, Clone, Copy)]
pub(crate) enum Objective<'a> {
    /// Mean squared error against one value per sequence.
    Regression(&'a [f64]),
    /// Softmax cross-entropy against one class per sequence.
    Classification(&'a [usize]),
}

impl Objective<'_> {
    fn len(&self) -> usize {
        match self {
            Objective::Regression(y) => y.len(),
            Objective::Classification(y) => y.len(),
        }
    }

    /// Loss of one example and its derivative with respect to the outputs.
    fn loss_and_grad(&self, i: usize, output: &[f64], d_out: &mut [f64]) -> f64 {
        match self {
            Objective::Regression(y) => {
                let err = output[0] - y[i];
                d_out[0] = 2.0 * err;
                err * err
            }
            Objective::Classification(y) => {
                let probs = softmax(output);
                for (k, p) in probs.iter().enumerate() {
                    d_out[k] = p - if k == y[i] { 1.0 } else { 0.0 };
                }
                -probs[y[i]].max(1e-300).ln()
            }
        }
    }

    fn loss(&self, i: usize, output: &[f64]) -> f64 {
        let mut scratch = vec![0.0; output.len()];
        self.loss_and_grad(i, output, &mut scratch)
    }
}

pub(crate) fn softmax(x: &[f64]) -> Vec<f64> {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = x.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Mean loss over a set, dropout disabled.
pub(crate) fn mean_loss(net: &ConvNet, seqs: &[Vec<u32>], objective: Objective<'_>) -> f64 {
    if seqs.is_empty() {
        return f64::NAN;
    }
    seqs.iter()
        .enumerate()
        .map(|(i, s)| objective.loss(i, &net.forward(s).output))
        .sum::<f64>()
        / seqs.len() as f64
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub train_loss: Vec<f64>,
    pub validation_loss: Vec<f64>,
    /// Epoch whose parameters were kept (best validation loss, else last).
    pub best_epoch: usize,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
    lr: f64,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize, lr: f64) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
            lr,
        }
    }

    fn update(&mut self, params: &mut [f64], grad: &[f64], frozen: std::ops::Range<usize>) {
        self.step += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.step);
        let c2 = 1.0 - Self::BETA2.powi(self.step);
        for i in 0..params.len() {
            if frozen.contains(&i) {
                continue;
            }
            let g = grad[i];
            self.m[i] = Self::BETA1 * self.m[i] + (1.0 - Self::BETA1) * g;
            self.v[i] = Self::BETA2 * self.v[i] + (1.0 - Self::BETA2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + Self::EPS);
        }
    }
}

/// Mini-batch Adam training. When a validation set is given, the parameters
/// from the epoch with the lowest validation loss are kept.
pub(crate) fn train_network(
    net: &mut ConvNet,
    seqs: &[Vec<u32>],
    objective: Objective<'_>,
    validation: Option<(&[Vec<u32>], Objective<'_>)>,
    hyper: &CnnHyper,
    rng: &mut ChaCha8Rng,
) -> Result<TrainLog, ModelError> {
    if seqs.len() != objective.len() {
        return Err(ModelError::DimensionMismatch {
            expected: seqs.len(),
            found: objective.len(),
        });
    }
    let max_window = net.max_window();
    if let Some(short) = seqs.iter().find(|s| s.len() < max_window) {
        return Err(ModelError::SequenceTooShort {
            len: short.len(),
            window: max_window,
        });
    }

    let n_feat = net.features();
    let pad_row = 0..net.embed_dim;
    let mut adam = Adam::new(net.params.len(), hyper.learning_rate);
    let mut grad = vec![0.0; net.params.len()];
    let mut d_out = vec![0.0; net.outputs];
    let mut mask = vec![1.0; n_feat];
    let keep = 1.0 - hyper.dropout;
    let mut order: Vec<usize> = (0..seqs.len()).collect();
    let mut log = TrainLog::default();
    let mut best: Option<(f64, Vec<f64>)> = None;

    for epoch in 0..hyper.epochs {
        order.shuffle(rng);
        let mut epoch_loss = 0.0;
        for (b, batch) in order.chunks(hyper.batch_size).enumerate() {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut batch_loss = 0.0;
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let use_mask = hyper.dropout > 0.0;
                if use_mask {
                    for m in mask.iter_mut() {
                        *m = if rng.random::<f64>() < keep {
                            1.0 / keep
                        } else {
                            0.0
                        };
                    }
                }
                let m = use_mask.then_some(mask.as_slice());
                let trace = net.forward_with_mask(&seqs[i], m);
                batch_loss += objective.loss_and_grad(i, &trace.output, &mut d_out);
                d_out.iter_mut().for_each(|g| *g *= scale);
                net.backward(&seqs[i], &trace, m, &d_out, &mut grad);
            }
            if !batch_loss.is_finite() {
                return Err(ModelError::NonFiniteLoss {
                    epoch,
                    batch: b,
                    loss: batch_loss,
                });
            }
            epoch_loss += batch_loss;
            adam.update(&mut net.params, &grad, pad_row.clone());
        }
        log.train_loss.push(epoch_loss / seqs.len() as f64);

        if let Some((val_seqs, val_obj)) = validation.filter(|(s, _)| !s.is_empty()) {
            let loss = mean_loss(net, val_seqs, val_obj);
            if !loss.is_finite() {
                return Err(ModelError::NonFiniteLoss {
                    epoch,
                    batch: usize::MAX,
                    loss,
                });
            }
            log.validation_loss.push(loss);
            if best.as_ref().is_none_or(|(b, _)| loss < *b) {
                best = Some((loss, net.params.clone()));
                log.best_epoch = epoch;
            }
        } else {
            log.best_epoch = epoch;
        }
    }
    if let Some((_, params)) = best {
        net.params = params;
    }
    Ok(log)
}

/// Encode messages for a network, truncating to `max_len`.
pub fn encode_messages<S: AsRef<str>>(
    messages: &[S],
    vocab: &Vocabulary,
    max_len: usize,
) -> Vec<Vec<u32>> {
    messages
        .iter()
        .map(|m| encode_sequence(&tokenize(m.as_ref()), vocab, max_len))
        .collect()
}

/// TextCNN effort regressor working in log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnnModel {
    pub hyper: CnnHyper,
    pub vocab: Vocabulary,
    pub net: ConvNet,
    pub trained: bool,
    pub log: TrainLog,
}

impl CnnModel {
    /// Freshly initialized, untrained model.
    pub fn new(vocab: Vocabulary, hyper: CnnHyper) -> Result<Self, ModelError> {
        hyper.validate()?;
        let mut net = ConvNet::new(
            vocab.len(),
            hyper.embed_dim,
            hyper.window_sizes.clone(),
            hyper.filters_per_window,
            1,
        );
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
        net.initialize(&mut rng);
        Ok(Self {
            hyper,
            vocab,
            net,
            trained: false,
            log: TrainLog::default(),
        })
    }

    /// Wrap hand-built parameters; the result counts as trained.
    pub fn from_parts(vocab: Vocabulary, hyper: CnnHyper, net: ConvNet) -> Self {
        Self {
            hyper,
            vocab,
            net,
            trained: true,
            log: TrainLog::default(),
        }
    }

    pub fn encode(&self, message: &str) -> Vec<u32> {
        let seq = encode_sequence(&tokenize(message), &self.vocab, self.hyper.max_len);
        pad_to(seq, self.net.max_window())
    }

    /// Prediction in log space.
    pub fn predict_encoded(&self, seq: &[u32]) -> f64 {
        self.net.forward(seq).output[0]
    }

    pub fn predict_log(&self, message: &str) -> f64 {
        self.predict_encoded(&self.encode(message))
    }
}

fn pad_to(mut seq: Vec<u32>, len: usize) -> Vec<u32> {
    if seq.len() < len {
        seq.resize(len, PAD);
    }
    seq
}

/// Fit a TextCNN regressor on log-space targets. The vocabulary is built
/// from the training messages.
pub fn textcnn_fit<S: AsRef<str>>(
    messages: &[S],
    targets: &[f64],
    validation: Option<(&[S], &[f64])>,
    hyper: &CnnHyper,
) -> Result<CnnModel, ModelError> {
    if messages.len() != targets.len() {
        return Err(ModelError::DimensionMismatch {
            expected: messages.len(),
            found: targets.len(),
        });
    }
    if messages.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    if let Some(bad) = targets.iter().find(|y| !y.is_finite()) {
        return Err(ModelError::NonFiniteLoss {
            epoch: 0,
            batch: 0,
            loss: *bad,
        });
    }
    let tokens: Vec<Vec<String>> = messages.iter().map(|m| tokenize(m.as_ref())).collect();
    let vocab = Vocabulary::build(&tokens, hyper.min_freq);
    let mut model = CnnModel::new(vocab, hyper.clone())?;
    let seqs: Vec<Vec<u32>> = messages.iter().map(|m| model.encode(m.as_ref())).collect();
    let val = validation.map(|(msgs, ys)| {
        let seqs: Vec<Vec<u32>> = msgs.iter().map(|m| model.encode(m.as_ref())).collect();
        (seqs, ys)
    });

    // Start the output bias at the target mean; the weights then only need
    // to learn deviations from it.
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    model.net.output_bias_mut()[0] = mean;

    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed.wrapping_add(1));
    let log = train_network(
        &mut model.net,
        &seqs,
        Objective::Regression(targets),
        val.as_ref()
            .map(|(s, ys)| (s.as_slice(), Objective::Regression(ys))),
        hyper,
        &mut rng,
    )?;
    model.log = log;
    model.trained = true;
    Ok(model)
}

/// Encoded-sequence variant used when the caller controls the vocabulary.
pub fn textcnn_fit_sequences(
    vocab: Vocabulary,
    seqs: &[Vec<u32>],
    targets: &[f64],
    hyper: &CnnHyper,
) -> Result<CnnModel, ModelError> {
    let mut model = CnnModel::new(vocab, hyper.clone())?;
    if !targets.is_empty() {
        model.net.output_bias_mut()[0] = targets.iter().sum::<f64>() / targets.len() as f64;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed.wrapping_add(1));
    model.log = train_network(
        &mut model.net,
        seqs,
        Objective::Regression(targets),
        None,
        hyper,
        &mut rng,
    )?;
    model.trained = true;
    Ok(model)
}

pub fn textcnn_predict<S: AsRef<str>>(model: &CnnModel, messages: &[S]) -> Vec<f64> {
    messages
        .iter()
        .map(|m| model.predict_log(m.as_ref()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_net(seed: u64) -> ConvNet {
        let mut net = ConvNet::new(6, 4, vec![1, 2], 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        net.initialize(&mut rng);
        // Larger weights keep pooled responses away from the ReLU kink.
        for v in net.params.iter_mut().skip(4) {
            *v *= 8.0;
        }
        net.output_bias_mut()[0] = 0.3;
        net
    }

    fn loss_of(net: &ConvNet, seq: &[u32], obj: Objective<'_>) -> f64 {
        obj.loss(0, &net.forward(seq).output)
    }

    fn check_gradients(net: &ConvNet, seq: &[u32], obj: Objective<'_>) -> f64 {
        let (_, analytic) = net.loss_gradient(seq, obj);

        let eps = 1e-5;
        let mut worst: f64 = 0.0;
        // Row 0 is the fixed padding embedding.
        for i in net.embed_dim..net.params.len() {
            let mut plus = net.clone();
            plus.params[i] += eps;
            let mut minus = net.clone();
            minus.params[i] -= eps;
            let numeric = (loss_of(&plus, seq, obj) - loss_of(&minus, seq, obj)) / (2.0 * eps);
            let a = analytic[i];
            let scale = a.abs().max(numeric.abs());
            if scale < 1e-7 {
                assert!((a - numeric).abs() < 1e-7, "param {i}: {a} vs {numeric}");
                continue;
            }
            worst = worst.max((a - numeric).abs() / scale);
        }
        worst
    }

    #[test]
    fn finite_difference_gradients() {
        for seed in 0..5 {
            let net = toy_net(seed);
            let seq = [2u32, 3, 4];
            let y = [0.7];
            let worst = check_gradients(&net, &seq, Objective::Regression(&y));
            assert!(worst < 1e-4, "seed {seed}: max relative error {worst}");
        }
    }

    #[test]
    fn finite_difference_gradients_classification() {
        let mut net = ConvNet::new(6, 4, vec![1, 2], 2, 5);
        net.initialize(&mut ChaCha8Rng::seed_from_u64(9));
        for v in net.params.iter_mut().skip(4) {
            *v *= 3.0;
        }
        let y = [3usize];
        let worst = check_gradients(&net, &[5, 2, 3], Objective::Classification(&y));
        assert!(worst < 1e-4, "max relative error {worst}");
        let y = [0usize];
        let worst = check_gradients(&net, &[1, 4, 0], Objective::Classification(&y));
        assert!(worst < 1e-4, "with padding: max relative error {worst}");
    }

    #[test]
    fn pooled_width_is_windows_times_filters() {
        let mut net = ConvNet::new(10, 300, vec![1, 2, 3, 4, 5], 200, 1);
        net.initialize(&mut ChaCha8Rng::seed_from_u64(1));
        let trace = net.forward(&[2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(trace.pooled.len(), 1000);
        assert_eq!(net.features(), 1000);
    }

    fn small_hyper() -> CnnHyper {
        CnnHyper {
            embed_dim: 8,
            window_sizes: vec![1, 2],
            filters_per_window: 4,
            epochs: 5,
            batch_size: 8,
            learning_rate: 1e-2,
            dropout: 0.0,
            ..CnnHyper::default()
        }
    }

    #[test]
    fn constant_targets_are_learned() {
        let msgs: Vec<String> = (0..40)
            .map(|i| format!("word{} other{}", i % 7, i % 3))
            .collect();
        let ys = vec![2.5; msgs.len()];
        let hyper = CnnHyper {
            epochs: 60,
            ..small_hyper()
        };
        let model = textcnn_fit(&msgs, &ys, None, &hyper).unwrap();
        for m in msgs.iter().map(String::as_str).chain(["", "unseen words"]) {
            let p = model.predict_log(m);
            assert!((p - 2.5).abs() < 1e-2, "{m:?}: {p}");
        }
    }

    #[test]
    fn training_is_deterministic() {
        let msgs: Vec<String> = (0..30).map(|i| format!("w{} x{}", i % 5, i % 4)).collect();
        let ys: Vec<f64> = (0..30).map(|i| (i % 5) as f64).collect();
        let mut hyper = small_hyper();
        hyper.dropout = 0.5;
        let a = textcnn_fit(&msgs, &ys, None, &hyper).unwrap();
        let b = textcnn_fit(&msgs, &ys, None, &hyper).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn short_sequences_are_rejected() {
        let mut net = ConvNet::new(4, 2, vec![3], 1, 1);
        net.initialize(&mut ChaCha8Rng::seed_from_u64(0));
        let err = train_network(
            &mut net,
            &[vec![2, 3]],
            Objective::Regression(&[1.0]),
            None,
            &small_hyper(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ModelError::SequenceTooShort { len: 2, window: 3 }
        ));
    }

    #[test]
    fn exploding_training_reports_non_finite_loss() {
        let msgs = vec!["a b", "c d"];
        let ys = vec![f64::INFINITY, 1.0];
        assert!(matches!(
            textcnn_fit(&msgs, &ys, None, &small_hyper()),
            Err(ModelError::NonFiniteLoss { .. })
        ));
    }

    #[test]
    fn hyper_validation() {
        let mut h = CnnHyper::default();
        assert!(h.validate().is_ok());
        h.window_sizes.clear();
        assert!(h.validate().is_err());
        let h = CnnHyper {
            filters_per_window: 0,
            ..CnnHyper::default()
        };
        assert!(h.validate().is_err());
    }
}
