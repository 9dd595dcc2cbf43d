//! Feed-forward neural network with back-propagation and epoch
//! training.
//!
//! Neurons compute `sigmoid(sum(w_i * a_i) - t; c)` with
//! `sigmoid(x; c) = 1 / (1 + e^(-c*x))`. Subjects are encoded on the
//! output layer as binary, most-significant bit on the first neuron,
//! so the layer needs `ceil(log2(n))` neurons for `n` encodable ids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ClassifyError, Match, ResultSet};

/// Defaults taken from the application's classifier parameters.
pub const DEFAULT_EPOCHS: usize = 20;
pub const DEFAULT_MIN_ERROR: f64 = 0.1;
pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_BETA: f64 = 1.0;
pub const DEFAULT_STEEPNESS: f64 = 1.0;

/// Output-layer width for `n` encodable subject ids: `ceil(log2(n))`,
/// at least one neuron.
pub fn output_layer_size(n: usize) -> usize {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Per-weight and per-threshold gradients of the squared error
/// `E = 1/2 * sum (target - output)^2`.
#[derive(Debug, Clone)]
pub struct Gradient {
    /// `d E / d w[layer][to][from]`.
    pub weights: Vec<Vec<Vec<f64>>>,
    /// `d E / d t[layer][neuron]`.
    pub thresholds: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct NeuralNet {
    layer_sizes: Vec<usize>,
    /// `weights[l][i][j]`: edge from neuron `j` of layer `l` to neuron
    /// `i` of layer `l + 1`.
    weights: Vec<Vec<Vec<f64>>>,
    /// `thresholds[l][i]`: threshold of neuron `i` of layer `l + 1`.
    thresholds: Vec<Vec<f64>>,
    pub steepness: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl NeuralNet {
    /// Builds a fully connected net with weights and thresholds drawn
    /// uniformly from [-0.5, 0.5].
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self, ClassifyError> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(ClassifyError::TooFewLayers);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut thresholds = Vec::new();
        for pair in layer_sizes.windows(2) {
            let (from, to) = (pair[0], pair[1]);
            weights.push(
                (0..to)
                    .map(|_| (0..from).map(|_| rng.random_range(-0.5..0.5)).collect())
                    .collect(),
            );
            thresholds.push((0..to).map(|_| rng.random_range(-0.5..0.5)).collect());
        }
        Ok(NeuralNet {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            thresholds,
            steepness: DEFAULT_STEEPNESS,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
        })
    }

    pub fn from_parts(
        layer_sizes: Vec<usize>,
        weights: Vec<Vec<Vec<f64>>>,
        thresholds: Vec<Vec<f64>>,
    ) -> Self {
        NeuralNet {
            layer_sizes,
            weights,
            thresholds,
            steepness: DEFAULT_STEEPNESS,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
        }
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn weights(&self) -> &[Vec<Vec<f64>>] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [Vec<Vec<f64>>] {
        &mut self.weights
    }

    pub fn thresholds(&self) -> &[Vec<f64>] {
        &self.thresholds
    }

    pub fn thresholds_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.thresholds
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    fn sigmoid(&self, x: f64) -> f64 {
        1.0 / (1.0 + (-self.steepness * x).exp())
    }

    /// Layer-by-layer activations, input included.
    fn activations(&self, input: &[f64]) -> Result<Vec<Vec<f64>>, ClassifyError> {
        if input.len() != self.input_size() {
            return Err(ClassifyError::InputSizeMismatch {
                want: self.input_size(),
                got: input.len(),
            });
        }
        let mut layers = vec![input.to_vec()];
        for (w, t) in self.weights.iter().zip(&self.thresholds) {
            let prev = layers.last().unwrap();
            let next: Vec<f64> = w
                .iter()
                .zip(t)
                .map(|(row, thr)| {
                    let net: f64 = row.iter().zip(prev).map(|(wi, ai)| wi * ai).sum();
                    self.sigmoid(net - thr)
                })
                .collect();
            layers.push(next);
        }
        Ok(layers)
    }

    /// Output-layer activations for the input.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, ClassifyError> {
        Ok(self.activations(input)?.pop().unwrap())
    }

    /// Per-neuron deltas, back to front. The output layer uses
    /// `Err * f'(in)`; hidden layers fold the downstream deltas back
    /// through the connecting weights.
    fn deltas(&self, layers: &[Vec<f64>], target: &[f64]) -> Vec<Vec<f64>> {
        let c = self.steepness;
        let out = layers.last().unwrap();
        let mut all: Vec<Vec<f64>> = vec![Vec::new(); self.weights.len()];
        all[self.weights.len() - 1] = out
            .iter()
            .zip(target)
            .map(|(o, t)| (t - o) * c * o * (1.0 - o))
            .collect();
        for l in (0..self.weights.len() - 1).rev() {
            let downstream = &self.weights[l + 1];
            let next_delta = all[l + 1].clone();
            let act = &layers[l + 1];
            all[l] = act
                .iter()
                .enumerate()
                .map(|(j, a)| {
                    let sum: f64 = downstream
                        .iter()
                        .zip(&next_delta)
                        .map(|(row, d)| row[j] * d)
                        .sum();
                    c * a * (1.0 - a) * sum
                })
                .collect();
        }
        all
    }

    /// Analytic gradient of `E = 1/2 * sum (target - output)^2`.
    pub fn error_gradient(&self, input: &[f64], target: &[f64]) -> Result<Gradient, ClassifyError> {
        let layers = self.activations(input)?;
        let deltas = self.deltas(&layers, target);
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(l, w)| {
                w.iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, _)| -deltas[l][i] * layers[l][j])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let thresholds = deltas
            .iter()
            .map(|layer| layer.to_vec())
            .collect();
        Ok(Gradient {
            weights,
            thresholds,
        })
    }

    /// Squared error of one sample on the current weights.
    pub fn sample_error(&self, input: &[f64], target: &[f64]) -> Result<f64, ClassifyError> {
        let out = self.forward(input)?;
        Ok(out
            .iter()
            .zip(target)
            .map(|(o, t)| (t - o) * (t - o))
            .sum::<f64>()
            / 2.0)
    }

    /// Binary target pattern for a subject, MSB on the first neuron.
    pub fn target_bits(subject: u32, bits: usize) -> Result<Vec<f64>, ClassifyError> {
        if bits < 32 && u64::from(subject) >= 1u64 << bits {
            return Err(ClassifyError::UnencodableSubject {
                id: subject,
                bits,
            });
        }
        Ok((0..bits)
            .map(|i| f64::from((subject >> (bits - 1 - i)) & 1))
            .collect())
    }

    /// Epoch training over `(vector, subject)` pairs. Within an epoch
    /// every sample is evaluated against the committed weights; the
    /// updates `w <- beta*w + alpha*a*delta` accumulate in a shadow
    /// copy that is committed when the epoch ends. Training stops when
    /// the mean sample error drops below `min_error` or after `epochs`
    /// epochs. Returns the number of epochs run.
    pub fn train(
        &mut self,
        samples: &[(Vec<f64>, u32)],
        epochs: usize,
        min_error: f64,
    ) -> Result<usize, ClassifyError> {
        let bits = self.output_size();
        let targets: Vec<Vec<f64>> = samples
            .iter()
            .map(|(_, id)| Self::target_bits(*id, bits))
            .collect::<Result<_, _>>()?;

        for epoch in 1..=epochs {
            let mut shadow_w = self.weights.clone();
            let mut shadow_t = self.thresholds.clone();
            for ((input, _), target) in samples.iter().zip(&targets) {
                let layers = self.activations(input)?;
                let deltas = self.deltas(&layers, target);
                for l in 0..shadow_w.len() {
                    for i in 0..shadow_w[l].len() {
                        for j in 0..shadow_w[l][i].len() {
                            shadow_w[l][i][j] =
                                self.beta * shadow_w[l][i][j] + self.alpha * layers[l][j] * deltas[l][i];
                        }
                        // The threshold acts as a weight on a constant
                        // -1 input.
                        shadow_t[l][i] =
                            self.beta * shadow_t[l][i] - self.alpha * deltas[l][i];
                    }
                }
            }
            self.weights = shadow_w;
            self.thresholds = shadow_t;

            let mut mean = 0.0;
            for ((input, _), target) in samples.iter().zip(&targets) {
                mean += self.sample_error(input, target)?;
            }
            mean /= samples.len().max(1) as f64;
            if mean < min_error {
                return Ok(epoch);
            }
        }
        Ok(epochs)
    }

    /// Thresholds each output at 0.5, reads the bits as the subject id,
    /// and derives the runner-up by flipping the least-confident bit.
    pub fn classify(&self, v: &[f64]) -> Result<ResultSet, ClassifyError> {
        let out = self.forward(v)?;
        let bits: Vec<bool> = out.iter().map(|&o| o >= 0.5).collect();
        let id = bits_to_id(&bits);
        let pattern: Vec<f64> = bits.iter().map(|&b| f64::from(b)).collect();
        let score = distance(&out, &pattern);

        let least_confident = (0..out.len())
            .min_by(|&a, &b| (out[a] - 0.5).abs().total_cmp(&(out[b] - 0.5).abs()))
            .unwrap();
        let mut flipped = bits.clone();
        flipped[least_confident] = !flipped[least_confident];
        let second_id = bits_to_id(&flipped);
        let second_pattern: Vec<f64> = flipped.iter().map(|&b| f64::from(b)).collect();

        Ok(ResultSet::new(vec![
            Match {
                subject_id: id,
                score,
            },
            Match {
                subject_id: second_id,
                score: distance(&out, &second_pattern),
            },
        ]))
    }
}

fn bits_to_id(bits: &[bool]) -> u32 {
    bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b))
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_sizing_follows_ceil_log2() {
        assert_eq!(output_layer_size(2), 1);
        assert_eq!(output_layer_size(10), 4);
        assert_eq!(output_layer_size(33), 6);
        assert_eq!(output_layer_size(1), 1);
        assert_eq!(output_layer_size(11), 4);
    }

    #[test]
    fn zero_weights_give_half_outputs() {
        let mut net = NeuralNet::new(&[3, 2, 2], 1).unwrap();
        for layer in &mut net.weights {
            for row in layer {
                row.iter_mut().for_each(|w| *w = 0.0);
            }
        }
        for layer in &mut net.thresholds {
            layer.iter_mut().for_each(|t| *t = 0.0);
        }
        let out = net.forward(&[0.3, -0.1, 0.9]).unwrap();
        assert!(out.iter().all(|&o| (o - 0.5).abs() < 1e-15));
    }

    #[test]
    fn steepness_saturates_positive_input() {
        let mut net = NeuralNet::new(&[1, 1], 2).unwrap();
        net.weights[0][0][0] = 1.0;
        net.thresholds[0][0] = 0.0;
        net.steepness = 200.0;
        let out = net.forward(&[0.5]).unwrap();
        assert!(out[0] > 0.999999);
    }

    #[test]
    fn forward_matches_hand_computation() {
        let mut net = NeuralNet::new(&[2, 2, 1], 3).unwrap();
        net.weights[0] = vec![vec![0.1, -0.2], vec![0.3, 0.4]];
        net.thresholds[0] = vec![0.05, -0.1];
        net.weights[1] = vec![vec![0.7, -0.6]];
        net.thresholds[1] = vec![0.2];
        let sig = |x: f64| 1.0 / (1.0 + (-x).exp());
        let h0 = sig(0.1 * 1.0 + -0.2 * 2.0 - 0.05);
        let h1 = sig(0.3 * 1.0 + 0.4 * 2.0 + 0.1);
        let want = sig(0.7 * h0 - 0.6 * h1 - 0.2);
        let out = net.forward(&[1.0, 2.0]).unwrap();
        assert!((out[0] - want).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut net = NeuralNet::new(&[4, 3, 2], 12).unwrap();
        net.steepness = 1.3;
        let input = [0.2, -0.7, 0.4, 0.9];
        let target = [1.0, 0.0];
        let grad = net.error_gradient(&input, &target).unwrap();
        let eps = 1e-5;
        for l in 0..net.weights.len() {
            for i in 0..net.weights[l].len() {
                for j in 0..net.weights[l][i].len() {
                    let mut plus = net.clone();
                    plus.weights[l][i][j] += eps;
                    let mut minus = net.clone();
                    minus.weights[l][i][j] -= eps;
                    let fd = (plus.sample_error(&input, &target).unwrap()
                        - minus.sample_error(&input, &target).unwrap())
                        / (2.0 * eps);
                    let got = grad.weights[l][i][j];
                    let denom = fd.abs().max(got.abs()).max(1e-8);
                    assert!(
                        (fd - got).abs() / denom <= 1e-4,
                        "w[{l}][{i}][{j}]: fd {fd} vs {got}"
                    );
                }
                let mut plus = net.clone();
                plus.thresholds[l][i] += eps;
                let mut minus = net.clone();
                minus.thresholds[l][i] -= eps;
                let fd = (plus.sample_error(&input, &target).unwrap()
                    - minus.sample_error(&input, &target).unwrap())
                    / (2.0 * eps);
                let got = grad.thresholds[l][i];
                let denom = fd.abs().max(got.abs()).max(1e-8);
                assert!((fd - got).abs() / denom <= 1e-4, "t[{l}][{i}]");
            }
        }
    }

    #[test]
    fn zero_alpha_with_unit_beta_is_a_fixed_point() {
        let mut net = NeuralNet::new(&[2, 2, 1], 7).unwrap();
        net.alpha = 0.0;
        net.beta = 1.0;
        let before = net.clone();
        net.train(&[(vec![0.0, 1.0], 1), (vec![1.0, 0.0], 0)], 5, 0.0)
            .unwrap();
        assert_eq!(net.weights, before.weights);
        assert_eq!(net.thresholds, before.thresholds);
    }

    #[test]
    fn xor_trains_to_zero_classification_error() {
        let samples = vec![
            (vec![0.0, 0.0], 0u32),
            (vec![0.0, 1.0], 1u32),
            (vec![1.0, 0.0], 1u32),
            (vec![1.0, 1.0], 0u32),
        ];
        let mut net = NeuralNet::new(&[2, 2, 1], 4).unwrap();
        net.alpha = 2.0;
        net.train(&samples, 5000, 0.005).unwrap();
        for (input, id) in &samples {
            let got = net.classify(input).unwrap();
            assert_eq!(
                got.identified().unwrap().subject_id,
                *id,
                "input {input:?}"
            );
        }
    }

    #[test]
    fn classify_reads_binary_output() {
        let mut net = NeuralNet::new(&[1, 2], 5).unwrap();
        // Rig the outputs by saturating the two output neurons.
        net.weights[0] = vec![vec![100.0], vec![-100.0]];
        net.thresholds[0] = vec![0.0, 0.0];
        let set = net.classify(&[1.0]).unwrap();
        // Outputs (~1, ~0) -> bits 10 -> id 2.
        assert_eq!(set.identified().unwrap().subject_id, 2);
    }

    #[test]
    fn second_guess_flips_least_confident_bit() {
        let net = NeuralNet::from_parts(
            vec![1, 2],
            vec![vec![vec![0.03], vec![-2.0]]],
            vec![vec![0.0, 0.0]],
        );
        // Outputs: sigmoid(0.03) ~ 0.5075 (barely 1), sigmoid(-2) ~ 0.12 (0).
        let set = net.classify(&[1.0]).unwrap();
        assert_eq!(set.identified().unwrap().subject_id, 2); // bits 10
        assert_eq!(set.second_closest().unwrap().subject_id, 0); // flip MSB
    }

    #[test]
    fn all_zero_outputs_give_id_zero() {
        let net = NeuralNet::from_parts(
            vec![1, 2],
            vec![vec![vec![-50.0], vec![-50.0]]],
            vec![vec![0.0, 0.0]],
        );
        let set = net.classify(&[1.0]).unwrap();
        assert_eq!(set.identified().unwrap().subject_id, 0);
    }

    #[test]
    fn unencodable_subject_is_rejected() {
        assert!(NeuralNet::target_bits(2, 1).is_err());
        assert_eq!(NeuralNet::target_bits(10, 4).unwrap(), vec![1.0, 0.0, 1.0, 0.0]);
        let mut net = NeuralNet::new(&[2, 2, 1], 0).unwrap();
        assert!(matches!(
            net.train(&[(vec![0.0, 0.0], 5)], 1, 0.0),
            Err(ClassifyError::UnencodableSubject { id: 5, bits: 1 })
        ));
    }
}
