//! Dense feed-forward network: ReLU hidden layers, softmax output,
//! cross-entropy gradients and per-layer maskable SGD.
//!
//! Weights are stored column-major: entry `(o, i)` of a layer lives at
//! `i * out_dim + o`. A column is the fan-out of one input unit, so inputs
//! that are exactly zero (most MNIST pixels, inactive ReLUs) are skipped as a
//! whole contiguous slice in both the forward pass and the weight update.

use rand::distr::{Distribution, Uniform};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Weights and biases of one dense layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl LayerParams {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            biases: vec![0.0; out_dim],
        }
    }

    /// Builds a layer from row-major weights (`rows[o][i]`) and biases.
    pub fn from_rows(rows: &[Vec<f64>], biases: Vec<f64>) -> Result<Self> {
        let out_dim = rows.len();
        if out_dim == 0 || out_dim != biases.len() {
            return Err(Error::Shape(format!(
                "{} weight rows but {} biases",
                out_dim,
                biases.len()
            )));
        }
        let in_dim = rows[0].len();
        if in_dim == 0 || rows.iter().any(|r| r.len() != in_dim) {
            return Err(Error::Shape("ragged or empty weight rows".into()));
        }
        let mut layer = Self::zeros(in_dim, out_dim);
        for (o, row) in rows.iter().enumerate() {
            for (i, &w) in row.iter().enumerate() {
                layer.set_weight(o, i, w);
            }
        }
        layer.biases = biases;
        Ok(layer)
    }

    #[inline]
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    #[inline]
    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    #[inline]
    pub fn weight(&self, o: usize, i: usize) -> f64 {
        self.weights[i * self.out_dim + o]
    }

    #[inline]
    pub fn set_weight(&mut self, o: usize, i: usize, value: f64) {
        self.weights[i * self.out_dim + o] = value;
    }

    /// Raw column-major weight storage.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn biases_mut(&mut self) -> &mut [f64] {
        &mut self.biases
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    /// Iterates weights (storage order) then biases.
    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights.iter().chain(self.biases.iter()).copied()
    }

    /// `out = W * input + b`, skipping zero inputs.
    fn affine_into(&self, input: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.biases);
        for (col, &x) in self.weights.chunks_exact(self.out_dim).zip(input) {
            if x == 0.0 {
                continue;
            }
            for (z, &w) in out.iter_mut().zip(col) {
                *z += w * x;
            }
        }
    }

    /// `out[i] = sum_o W(o, i) * delta[o]`.
    fn transpose_mul_into(&self, delta: &[f64], out: &mut [f64]) {
        for (o, col) in out.iter_mut().zip(self.weights.chunks_exact(self.out_dim)) {
            *o = dot(col, delta);
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Layered dense network with one plasticity flag per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<LayerParams>,
    plastic: Vec<bool>,
    layer_sizes: Vec<usize>,
}

fn check_sizes(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::Config(format!(
            "need at least input and output sizes, got {layer_sizes:?}"
        )));
    }
    if layer_sizes.iter().any(|&s| s == 0) {
        return Err(Error::Config(format!(
            "layer sizes must be positive, got {layer_sizes:?}"
        )));
    }
    Ok(())
}

impl Mlp {
    /// Uniform `±1/sqrt(fan_in)` weights, zero biases, every layer plastic.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        check_sizes(layer_sizes)?;
        let mut rng = rng::stream(seed, Stream::Init);
        let layers = layer_sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = 1.0 / (fan_in as f64).sqrt();
                let dist = Uniform::new_inclusive(-limit, limit).expect("finite bounds");
                let mut layer = LayerParams::zeros(fan_in, fan_out);
                // Row-major draw order so the stream maps onto (o, i) independent of storage.
                for o in 0..fan_out {
                    for i in 0..fan_in {
                        layer.set_weight(o, i, dist.sample(&mut rng));
                    }
                }
                layer
            })
            .collect::<Vec<_>>();
        Ok(Self {
            plastic: vec![true; layers.len()],
            layers,
            layer_sizes: layer_sizes.to_vec(),
        })
    }

    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        check_sizes(layer_sizes)?;
        let layers: Vec<_> = layer_sizes
            .windows(2)
            .map(|w| LayerParams::zeros(w[0], w[1]))
            .collect();
        Ok(Self {
            plastic: vec![true; layers.len()],
            layers,
            layer_sizes: layer_sizes.to_vec(),
        })
    }

    pub fn from_layers(layers: Vec<LayerParams>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::Shape(format!(
                    "layer out_dim {} does not chain into in_dim {}",
                    pair[0].out_dim, pair[1].in_dim
                )));
            }
        }
        let mut layer_sizes = vec![layers[0].in_dim];
        layer_sizes.extend(layers.iter().map(|l| l.out_dim));
        Ok(Self {
            plastic: vec![true; layers.len()],
            layers,
            layer_sizes,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn n_classes(&self) -> usize {
        *self.layer_sizes.last().expect("at least two sizes")
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [LayerParams] {
        &mut self.layers
    }

    pub fn plastic(&self) -> &[bool] {
        &self.plastic
    }

    pub fn set_plastic(&mut self, mask: &[bool]) -> Result<()> {
        if mask.len() != self.layers.len() {
            return Err(Error::Shape(format!(
                "plasticity mask has {} flags for {} layers",
                mask.len(),
                self.layers.len()
            )));
        }
        self.plastic.copy_from_slice(mask);
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(LayerParams::param_count).sum()
    }

    pub fn plastic_param_count(&self) -> usize {
        self.layers
            .iter()
            .zip(&self.plastic)
            .filter(|(_, &p)| p)
            .map(|(l, _)| l.param_count())
            .sum()
    }

    /// All parameters, layer by layer, weights before biases.
    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers.iter().flat_map(LayerParams::params)
    }

    pub fn forward(&self, input: &[f64]) -> Result<ForwardTrace> {
        let mut trace = ForwardTrace::for_network(self);
        self.forward_into(input, &mut trace)?;
        Ok(trace)
    }

    /// Forward pass reusing the buffers of an existing trace.
    pub fn forward_into(&self, input: &[f64], trace: &mut ForwardTrace) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input has {} features, network expects {}",
                input.len(),
                self.input_dim()
            )));
        }
        trace.reshape_for(self);
        trace.activations[0].copy_from_slice(input);
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let (before, after) = trace.activations.split_at_mut(k + 1);
            let pre = &mut trace.pre_activations[k];
            layer.affine_into(&before[k], pre);
            let post = &mut after[0];
            if k == last {
                softmax_into(pre, post);
            } else {
                for (a, &z) in post.iter_mut().zip(pre.iter()) {
                    *a = z.max(0.0);
                }
            }
        }
        Ok(())
    }

    /// Gradient of `-ln p[label]` with respect to every parameter.
    pub fn backward(&self, trace: &ForwardTrace, label: usize) -> Result<GradientSet> {
        self.check_trace(trace, label)?;
        let mut grads = GradientSet::zeros_like(self);
        let mut delta = output_delta(trace, label);
        for k in (0..self.layers.len()).rev() {
            let layer = &self.layers[k];
            let input = &trace.activations[k];
            let g = &mut grads.layers[k];
            for (gcol, &x) in g.weights.chunks_exact_mut(layer.out_dim).zip(input) {
                for (gw, &d) in gcol.iter_mut().zip(&delta) {
                    *gw = d * x;
                }
            }
            g.biases.copy_from_slice(&delta);
            if k > 0 {
                let mut prev = vec![0.0; layer.in_dim];
                layer.transpose_mul_into(&delta, &mut prev);
                relu_mask(&mut prev, &trace.pre_activations[k - 1]);
                delta = prev;
            }
        }
        Ok(grads)
    }

    /// `params -= lr * grads` on plastic layers. Returns the L1 norm of the
    /// applied deltas (weights and biases of plastic layers).
    pub fn apply_update(&mut self, grads: &GradientSet, lr: f64) -> Result<f64> {
        if !(lr > 0.0) {
            return Err(Error::Config(format!("learning rate must be > 0, got {lr}")));
        }
        if !grads.matches(self) {
            return Err(Error::Shape("gradient set does not match network".into()));
        }
        let mut total = 0.0;
        for ((layer, g), &plastic) in self.layers.iter_mut().zip(&grads.layers).zip(&self.plastic) {
            if !plastic {
                continue;
            }
            let mut layer_sum = 0.0;
            for (w, &gw) in layer.weights.iter_mut().zip(&g.weights) {
                let d = lr * gw;
                *w -= d;
                layer_sum += d.abs();
            }
            for (b, &gb) in layer.biases.iter_mut().zip(&g.biases) {
                let d = lr * gb;
                *b -= d;
                layer_sum += d.abs();
            }
            total += layer_sum;
        }
        Ok(total)
    }

    /// Fused `backward` + `apply_update` for the training loop.
    ///
    /// Produces the same parameters and the same returned L1 value as the
    /// two-step path, but never materializes dense gradients, skips zero
    /// activations and stops back-propagating below the lowest plastic layer.
    pub fn sgd_step(
        &mut self,
        trace: &ForwardTrace,
        label: usize,
        lr: f64,
        scratch: &mut StepScratch,
    ) -> Result<f64> {
        self.check_trace(trace, label)?;
        if !(lr > 0.0) {
            return Err(Error::Config(format!("learning rate must be > 0, got {lr}")));
        }
        let Some(lowest) = self.plastic.iter().position(|&p| p) else {
            return Ok(0.0);
        };
        let n = self.layers.len();
        scratch.layer_l1.clear();
        scratch.layer_l1.resize(n, 0.0);
        scratch.delta.clear();
        scratch.delta.extend(
            trace
                .output_probs()
                .iter()
                .enumerate()
                .map(|(c, &p)| if c == label { p - 1.0 } else { p }),
        );
        for k in (lowest..n).rev() {
            let plastic = self.plastic[k];
            let propagate = k > lowest;
            let layer = &mut self.layers[k];
            let out_dim = layer.out_dim;
            let input = &trace.activations[k];
            if propagate {
                scratch.next.clear();
                scratch.next.resize(layer.in_dim, 0.0);
            }
            let delta = &scratch.delta;
            let mut layer_sum = 0.0;
            for (i, (col, &x)) in layer.weights.chunks_exact_mut(out_dim).zip(input).enumerate() {
                if propagate {
                    scratch.next[i] = dot(col, delta);
                }
                if !plastic || x == 0.0 {
                    continue;
                }
                for (w, &d) in col.iter_mut().zip(delta) {
                    let step = lr * (d * x);
                    *w -= step;
                    layer_sum += step.abs();
                }
            }
            if plastic {
                for (b, &d) in layer.biases.iter_mut().zip(delta) {
                    let step = lr * d;
                    *b -= step;
                    layer_sum += step.abs();
                }
            }
            scratch.layer_l1[k] = layer_sum;
            if propagate {
                relu_mask(&mut scratch.next, &trace.pre_activations[k - 1]);
                std::mem::swap(&mut scratch.delta, &mut scratch.next);
            }
        }
        Ok(scratch.layer_l1.iter().fold(0.0, |acc, v| acc + v))
    }

    /// Predicted class for one input, reusing `trace` as scratch.
    pub fn classify(&self, input: &[f64], trace: &mut ForwardTrace) -> Result<usize> {
        self.forward_into(input, trace)?;
        Ok(predict(trace))
    }

    fn check_trace(&self, trace: &ForwardTrace, label: usize) -> Result<()> {
        if label >= self.n_classes() {
            return Err(Error::Input(format!(
                "label {label} out of range for {} classes",
                self.n_classes()
            )));
        }
        if trace.activations.len() != self.layers.len() + 1
            || trace
                .activations
                .iter()
                .zip(&self.layer_sizes)
                .any(|(a, &s)| a.len() != s)
        {
            return Err(Error::Shape("trace was not produced by this network".into()));
        }
        Ok(())
    }
}

fn output_delta(trace: &ForwardTrace, label: usize) -> Vec<f64> {
    let mut delta = trace.output_probs().to_vec();
    delta[label] -= 1.0;
    delta
}

fn relu_mask(delta: &mut [f64], pre: &[f64]) {
    for (d, &z) in delta.iter_mut().zip(pre) {
        if z <= 0.0 {
            *d = 0.0;
        }
    }
}

/// Numerically stable softmax (max logit subtracted before exponentiation).
pub fn softmax_into(logits: &[f64], out: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (p, &z) in out.iter_mut().zip(logits) {
        *p = (z - max).exp();
        sum += *p;
    }
    for p in out.iter_mut() {
        *p /= sum;
    }
}

/// Argmax of the output probabilities; ties go to the lowest index.
pub fn predict(trace: &ForwardTrace) -> usize {
    argmax(trace.output_probs())
}

pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Cached activations from one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    /// `activations[0]` is the input; `activations[k + 1]` is the output of
    /// layer `k` (softmax probabilities for the last layer).
    activations: Vec<Vec<f64>>,
    pre_activations: Vec<Vec<f64>>,
}

impl ForwardTrace {
    pub fn for_network(mlp: &Mlp) -> Self {
        Self {
            activations: mlp.layer_sizes.iter().map(|&s| vec![0.0; s]).collect(),
            pre_activations: mlp.layer_sizes[1..].iter().map(|&s| vec![0.0; s]).collect(),
        }
    }

    fn reshape_for(&mut self, mlp: &Mlp) {
        let sizes = &mlp.layer_sizes;
        let fits = self.activations.len() == sizes.len()
            && self.activations.iter().zip(sizes).all(|(a, &s)| a.len() == s);
        if !fits {
            *self = Self::for_network(mlp);
        }
    }

    pub fn input(&self) -> &[f64] {
        &self.activations[0]
    }

    pub fn pre_activations(&self) -> &[Vec<f64>] {
        &self.pre_activations
    }

    /// Post-activation outputs of each layer, input excluded.
    pub fn post_activations(&self) -> &[Vec<f64>] {
        &self.activations[1..]
    }

    pub fn logits(&self) -> &[f64] {
        self.pre_activations.last().expect("at least one layer")
    }

    pub fn output_probs(&self) -> &[f64] {
        self.activations.last().expect("at least one layer")
    }
}

/// Gradients of one layer, laid out like [`LayerParams`] (column-major weights).
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads {
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl LayerGrads {
    #[inline]
    pub fn weight(&self, o: usize, i: usize) -> f64 {
        self.weights[i * self.out_dim + o]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub layers: Vec<LayerGrads>,
}

impl GradientSet {
    pub fn zeros_like(mlp: &Mlp) -> Self {
        Self {
            layers: mlp
                .layers
                .iter()
                .map(|l| LayerGrads {
                    out_dim: l.out_dim,
                    weights: vec![0.0; l.weights.len()],
                    biases: vec![0.0; l.biases.len()],
                })
                .collect(),
        }
    }

    /// Logit gradient (`probs - onehot(label)`), i.e. the output-layer bias gradient.
    pub fn output_delta(&self) -> &[f64] {
        &self.layers.last().expect("at least one layer").biases
    }

    fn matches(&self, mlp: &Mlp) -> bool {
        self.layers.len() == mlp.layers.len()
            && self.layers.iter().zip(&mlp.layers).all(|(g, l)| {
                g.out_dim == l.out_dim
                    && g.weights.len() == l.weights.len()
                    && g.biases.len() == l.biases.len()
            })
    }
}

/// Reusable buffers for [`Mlp::sgd_step`].
#[derive(Debug, Default, Clone)]
pub struct StepScratch {
    delta: Vec<f64>,
    next: Vec<f64>,
    layer_l1: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probs_trace(probs: &[f64]) -> ForwardTrace {
        ForwardTrace {
            activations: vec![vec![0.0], probs.to_vec()],
            pre_activations: vec![probs.to_vec()],
        }
    }

    #[test]
    fn mnist_sized_network_has_expected_parameter_count() {
        let mlp = Mlp::new(&[784, 200, 10], 1).unwrap();
        assert_eq!(mlp.param_count(), 784 * 200 + 200 + 200 * 10 + 10);
        assert_eq!(mlp.param_count(), 159_010);
    }

    #[test]
    fn init_is_deterministic_and_bounded() {
        let a = Mlp::new(&[2, 4, 2], 9).unwrap();
        let b = Mlp::new(&[2, 4, 2], 9).unwrap();
        assert!(a.params().zip(b.params()).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_ne!(a, Mlp::new(&[2, 4, 2], 10).unwrap());

        let big = Mlp::new(&[784, 200, 10], 1).unwrap();
        let limit = 1.0 / 784f64.sqrt();
        assert!(big.layers()[0].weights().iter().all(|w| w.abs() <= limit));
        assert!(big.layers().iter().all(|l| l.biases().iter().all(|&b| b == 0.0)));
        assert!(big.plastic().iter().all(|&p| p));
    }

    #[test]
    fn invalid_sizes_are_rejected() {
        assert!(matches!(Mlp::new(&[5], 1), Err(Error::Config(_))));
        assert!(matches!(Mlp::new(&[5, 0, 2], 1), Err(Error::Config(_))));
    }

    #[test]
    fn zero_network_outputs_uniform_probabilities() {
        let mlp = Mlp::zeros(&[3, 5, 4]).unwrap();
        let trace = mlp.forward(&[0.3, -2.0, 7.0]).unwrap();
        for &p in trace.output_probs() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn softmax_survives_huge_logits() {
        let mut out = [0.0; 3];
        softmax_into(&[1000.0, 1000.0, 1000.0], &mut out);
        for p in out {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        softmax_into(&[1e4, -1e4, 0.0], &mut out);
        assert!(out.iter().all(|p| p.is_finite()));
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn forward_rejects_wrong_input_length() {
        let mlp = Mlp::zeros(&[3, 2]).unwrap();
        assert!(matches!(mlp.forward(&[1.0, 2.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn predict_breaks_ties_low() {
        assert_eq!(predict(&probs_trace(&[0.1, 0.7, 0.2])), 1);
        assert_eq!(predict(&probs_trace(&[0.5, 0.5])), 0);
        assert_eq!(predict(&probs_trace(&[1.0 / 3.0; 3])), 0);
    }

    #[test]
    fn output_gradient_is_probs_minus_onehot() {
        let mlp = Mlp::zeros(&[2, 3]).unwrap();
        let trace = mlp.forward(&[0.5, 0.5]).unwrap();
        let g = mlp.backward(&trace, 0).unwrap();
        let expected = [-2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        for (a, b) in g.output_delta().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn perfect_prediction_has_zero_logit_gradient() {
        let trace = probs_trace(&[0.0, 1.0, 0.0]);
        assert_eq!(output_delta(&trace, 1), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn backward_rejects_bad_label() {
        let mlp = Mlp::zeros(&[2, 3]).unwrap();
        let trace = mlp.forward(&[0.5, 0.5]).unwrap();
        assert!(matches!(mlp.backward(&trace, 3), Err(Error::Input(_))));
    }

    #[test]
    fn apply_update_reports_l1_of_deltas() {
        let layer = LayerParams::from_rows(&[vec![0.0, 0.0]], vec![0.0]).unwrap();
        let mut mlp = Mlp::from_layers(vec![layer]).unwrap();
        let grads = GradientSet {
            layers: vec![LayerGrads { out_dim: 1, weights: vec![1.0, -2.0], biases: vec![0.5] }],
        };
        let l1 = mlp.apply_update(&grads, 0.1).unwrap();
        assert!((l1 - 0.35).abs() < 1e-15);
        assert!((mlp.layers()[0].weight(0, 1) - 0.2).abs() < 1e-15);
        assert!(matches!(mlp.apply_update(&grads, 0.0), Err(Error::Config(_))));
    }

    #[test]
    fn frozen_network_is_untouched() {
        let mut mlp = Mlp::new(&[3, 4, 2], 3).unwrap();
        mlp.set_plastic(&[false, false]).unwrap();
        let before = mlp.clone();
        let trace = mlp.forward(&[1.0, -1.0, 0.5]).unwrap();
        let grads = mlp.backward(&trace, 1).unwrap();
        assert_eq!(mlp.apply_update(&grads, 0.5).unwrap(), 0.0);
        let mut scratch = StepScratch::default();
        assert_eq!(mlp.sgd_step(&trace, 1, 0.5, &mut scratch).unwrap(), 0.0);
        assert!(mlp.params().zip(before.params()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn fused_step_matches_two_step_update() {
        for seed in 0..20 {
            let mut a = Mlp::new(&[6, 5, 4, 3], seed).unwrap();
            if seed % 3 == 1 {
                a.set_plastic(&[false, true, true]).unwrap();
            } else if seed % 3 == 2 {
                a.set_plastic(&[true, false, true]).unwrap();
            }
            let mut b = a.clone();
            let input: Vec<f64> = (0..6)
                .map(|i| if i % 2 == 0 { 0.0 } else { (i as f64 + seed as f64).sin() })
                .collect();
            let label = (seed % 3) as usize;
            let trace = a.forward(&input).unwrap();
            let grads = a.backward(&trace, label).unwrap();
            let l1_a = a.apply_update(&grads, 0.07).unwrap();
            let l1_b = b.sgd_step(&trace, label, 0.07, &mut StepScratch::default()).unwrap();
            assert_eq!(l1_a.to_bits(), l1_b.to_bits());
            assert!(a.params().zip(b.params()).all(|(x, y)| x == y));
        }
    }
}
