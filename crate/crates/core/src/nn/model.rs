//! Bias-free one-hidden-layer ReLU network with softmax cross-entropy.

use rand::Rng;

use super::idx::MnistDataset;
use crate::error::{Error, Result};
use crate::rng::RngStream;

pub const MNIST_INPUT: usize = 784;
pub const MNIST_HIDDEN: usize = 800;
pub const MNIST_CLASSES: usize = 10;

/// Row-major `C = op(A) · op(B) + beta · C` with `C` of shape `m × n`.
#[allow(clippy::too_many_arguments)]
fn gemm(m: usize, k: usize, n: usize, a: &[f64], a_t: bool, b: &[f64], b_t: bool, beta: f64, c: &mut [f64]) {
    assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    // A is stored m × k, or k × m when transposed; likewise B.
    let (rsa, csa) = if a_t { (1, m as isize) } else { (k as isize, 1) };
    let (rsb, csb) = if b_t { (1, k as isize) } else { (n as isize, 1) };
    // SAFETY: the asserts above bound every index dgemm touches for these
    // shapes and strides; `c` does not alias `a` or `b`.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Entries iid uniform on `[−b, b]` with `b = √(6/(rows + cols))`, row-major.
pub fn xavier_init(rows: usize, cols: usize, stream: RngStream) -> Vec<f64> {
    let b = (6.0 / (rows + cols) as f64).sqrt();
    let mut rng = stream.rng();
    (0..rows * cols).map(|_| rng.random_range(-b..=b)).collect()
}

/// A minibatch gathered into contiguous memory.
#[derive(Debug, Clone)]
pub struct Batch {
    pub x: Vec<f64>,
    pub labels: Vec<u8>,
}

impl Batch {
    pub fn gather(data: &MnistDataset, indices: &[usize]) -> Self {
        let mut x = Vec::with_capacity(indices.len() * data.features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            x.extend_from_slice(data.image(i));
            labels.push(data.labels[i]);
        }
        Self { x, labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Activations kept from the forward pass for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub batch: usize,
    pub pre_hidden: Vec<f64>,
    pub hidden: Vec<f64>,
    pub probs: Vec<f64>,
}

/// Parameters are one flat vector: `W1` (`input × hidden`, row-major)
/// followed by `W2` (`hidden × classes`, row-major). There are no biases.
#[derive(Debug, Clone, PartialEq)]
pub struct FnnModel {
    pub input: usize,
    pub hidden: usize,
    pub classes: usize,
    params: Vec<f64>,
}

impl FnnModel {
    pub fn from_params(input: usize, hidden: usize, classes: usize, params: Vec<f64>) -> Result<Self> {
        let d = input * hidden + hidden * classes;
        if params.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("model has non-finite weights".into()));
        }
        Ok(Self {
            input,
            hidden,
            classes,
            params,
        })
    }

    /// Xavier-initialized network; the two layers draw from child streams 0 and 1.
    pub fn xavier(input: usize, hidden: usize, classes: usize, stream: RngStream) -> Self {
        let mut params = xavier_init(input, hidden, stream.child(0));
        params.extend(xavier_init(hidden, classes, stream.child(1)));
        Self {
            input,
            hidden,
            classes,
            params,
        }
    }

    /// The 784-800-10 MNIST network.
    pub fn mnist(stream: RngStream) -> Self {
        Self::xavier(MNIST_INPUT, MNIST_HIDDEN, MNIST_CLASSES, stream)
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn w1(&self) -> &[f64] {
        &self.params[..self.input * self.hidden]
    }

    pub fn w2(&self) -> &[f64] {
        &self.params[self.input * self.hidden..]
    }

    /// Mean cross-entropy over the batch, with activations for [`Self::backward`].
    pub fn forward_loss(&self, batch: &Batch) -> Result<(f64, ForwardCache)> {
        let b = batch.len();
        if b == 0 {
            return Err(Error::EmptyInput("empty batch"));
        }
        if batch.x.len() != b * self.input {
            return Err(Error::DimensionMismatch {
                expected: b * self.input,
                found: batch.x.len(),
            });
        }
        let (h, c) = (self.hidden, self.classes);
        let mut pre_hidden = vec![0.0; b * h];
        gemm(b, self.input, h, &batch.x, false, self.w1(), false, 0.0, &mut pre_hidden);
        let hidden: Vec<f64> = pre_hidden.iter().map(|&z| z.max(0.0)).collect();
        let mut logits = vec![0.0; b * c];
        gemm(b, h, c, &hidden, false, self.w2(), false, 0.0, &mut logits);
        let (probs, loss) = softmax_cross_entropy(&logits, &batch.labels, c);
        Ok((
            loss,
            ForwardCache {
                batch: b,
                pre_hidden,
                hidden,
                probs,
            },
        ))
    }

    /// Gradient (+∇) of the mean cross-entropy, flattened like the parameters.
    /// `cache` must come from [`Self::forward_loss`] on the same batch.
    pub fn backward(&self, cache: &ForwardCache, batch: &Batch) -> Vec<f64> {
        let labels = &batch.labels;
        let (b, h, c) = (cache.batch, self.hidden, self.classes);
        let inv_b = 1.0 / b as f64;
        let mut dlogits = cache.probs.clone();
        for (row, &y) in labels.iter().enumerate() {
            dlogits[row * c + y as usize] -= 1.0;
        }
        dlogits.iter_mut().for_each(|v| *v *= inv_b);

        let mut grad = vec![0.0; self.dim()];
        let (g1, g2) = grad.split_at_mut(self.input * h);
        gemm(h, b, c, &cache.hidden, true, &dlogits, false, 0.0, g2);
        let mut dpre = vec![0.0; b * h];
        gemm(b, c, h, &dlogits, false, self.w2(), true, 0.0, &mut dpre);
        for (d, &z) in dpre.iter_mut().zip(&cache.pre_hidden) {
            if z <= 0.0 {
                *d = 0.0;
            }
        }
        gemm(self.input, b, h, &batch.x, true, &dpre, false, 0.0, g1);
        grad
    }

    pub fn loss_and_gradient(&self, batch: &Batch) -> Result<(f64, Vec<f64>)> {
        let (loss, cache) = self.forward_loss(batch)?;
        Ok((loss, self.backward(&cache, batch)))
    }

    /// `(mean loss, accuracy)` over a whole dataset, evaluated in chunks.
    pub fn evaluate(&self, data: &MnistDataset) -> Result<(f64, f64)> {
        use rayon::prelude::*;
        const CHUNK: usize = 1000;
        let n = data.len();
        if n == 0 {
            return Err(Error::EmptyInput("empty dataset"));
        }
        let parts: Vec<Result<(f64, usize)>> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|k| {
                let idx: Vec<usize> = (k * CHUNK..((k + 1) * CHUNK).min(n)).collect();
                let batch = Batch::gather(data, &idx);
                let (loss, cache) = self.forward_loss(&batch)?;
                let correct = batch
                    .labels
                    .iter()
                    .enumerate()
                    .filter(|(r, &y)| argmax(&cache.probs[r * self.classes..(r + 1) * self.classes]) == y as usize)
                    .count();
                Ok((loss * batch.len() as f64, correct))
            })
            .collect();
        let (mut loss, mut correct) = (0.0, 0);
        for p in parts {
            let (l, c) = p?;
            loss += l;
            correct += c;
        }
        Ok((loss / n as f64, correct as f64 / n as f64))
    }
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Row-wise softmax (max-subtracted) and the mean negative log-likelihood.
pub fn softmax_cross_entropy(logits: &[f64], labels: &[u8], classes: usize) -> (Vec<f64>, f64) {
    let mut probs = vec![0.0; logits.len()];
    let mut loss = 0.0;
    for (r, &y) in labels.iter().enumerate() {
        let row = &logits[r * classes..(r + 1) * classes];
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        let out = &mut probs[r * classes..(r + 1) * classes];
        for (p, &z) in out.iter_mut().zip(row) {
            *p = (z - max).exp();
            sum += *p;
        }
        out.iter_mut().for_each(|p| *p /= sum);
        loss += sum.ln() - (row[y as usize] - max);
    }
    (probs, loss / labels.len() as f64)
}
