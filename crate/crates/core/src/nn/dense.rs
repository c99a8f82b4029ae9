//! Feed-forward networks with rectifier hidden layers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{matvec_acc, matvec_t_acc, NnError};

/// Output head of a dense network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OutputActivation {
    /// Raw affine output (critics, Q heads).
    Identity,
    /// `mid + half * tanh(z)`, squashing into `[lo, hi]` (bounded actors).
    ScaledTanh { lo: f64, hi: f64 },
}

impl OutputActivation {
    fn apply(&self, z: f64) -> f64 {
        match *self {
            OutputActivation::Identity => z,
            OutputActivation::ScaledTanh { lo, hi } => {
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                mid + half * z.tanh()
            }
        }
    }

    /// Derivative expressed through the already-computed output y.
    fn derivative_from_output(&self, y: f64) -> f64 {
        match *self {
            OutputActivation::Identity => 1.0,
            OutputActivation::ScaledTanh { lo, hi } => {
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                let t = (y - mid) / half;
                half * (1.0 - t * t)
            }
        }
    }
}

/// Fully connected network; parameters live in one flat buffer laid out as
/// `[W0 (out x in, row-major), b0, W1, b1, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet {
    dims: Vec<usize>,
    params: Vec<f64>,
    output: OutputActivation,
    version: u64,
}

/// Intermediates of one forward pass, consumed by [`DenseNet::backward`].
#[derive(Debug, Clone)]
pub struct DenseCache {
    /// Layer activations; `acts[0]` is the input, `acts[L]` the output.
    acts: Vec<Vec<f64>>,
    /// Pre-activations `z_1 .. z_L`.
    pres: Vec<Vec<f64>>,
    version: u64,
}

impl DenseCache {
    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("cache holds at least the input")
    }
}

impl DenseNet {
    /// Zero-initialized network. `dims` lists every layer size including
    /// input and output, so `[3, 128, 128, 1]` is a 2-hidden-layer net.
    pub fn zeros(dims: &[usize], output: OutputActivation) -> Self {
        assert!(dims.len() >= 2, "need at least input and output dims");
        assert!(dims.iter().all(|&d| d > 0), "zero-width layer");
        let n = Self::param_count(dims);
        Self {
            dims: dims.to_vec(),
            params: vec![0.0; n],
            output,
            version: 0,
        }
    }

    /// Random init, uniform in +-1/sqrt(fan_in) per layer.
    pub fn init<R: Rng + ?Sized>(dims: &[usize], output: OutputActivation, rng: &mut R) -> Self {
        let mut net = Self::zeros(dims, output);
        let mut off = 0;
        for l in 0..dims.len() - 1 {
            let (fan_in, fan_out) = (dims[l], dims[l + 1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            for p in &mut net.params[off..off + fan_out * (fan_in + 1)] {
                *p = rng.random_range(-bound..bound);
            }
            off += fan_out * (fan_in + 1);
        }
        net
    }

    pub fn param_count(dims: &[usize]) -> usize {
        dims.windows(2).map(|w| w[1] * (w[0] + 1)).sum()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn output_activation(&self) -> OutputActivation {
        self.output
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Mutable parameter access; invalidates outstanding forward caches.
    pub fn params_mut(&mut self) -> &mut [f64] {
        self.version += 1;
        &mut self.params
    }

    pub(crate) fn from_parts(dims: Vec<usize>, params: Vec<f64>, output: OutputActivation) -> Self {
        assert_eq!(params.len(), Self::param_count(&dims));
        Self {
            dims,
            params,
            output,
            version: 0,
        }
    }

    /// Weight and bias slices of layer `l`.
    pub fn layer(&self, l: usize) -> (&[f64], &[f64]) {
        let (off, rows, cols) = self.layer_offset(l);
        (
            &self.params[off..off + rows * cols],
            &self.params[off + rows * cols..off + rows * (cols + 1)],
        )
    }

    fn layer_offset(&self, l: usize) -> (usize, usize, usize) {
        let mut off = 0;
        for k in 0..l {
            off += self.dims[k + 1] * (self.dims[k] + 1);
        }
        (off, self.dims[l + 1], self.dims[l])
    }

    pub fn num_layers(&self) -> usize {
        self.dims.len() - 1
    }

    /// Evaluate the network, keeping intermediates for backprop.
    pub fn forward(&self, input: &[f64]) -> Result<DenseCache, NnError> {
        if input.len() != self.dims[0] {
            return Err(NnError::ShapeMismatch {
                expected: self.dims[0],
                got: input.len(),
            });
        }
        let layers = self.num_layers();
        let mut acts = Vec::with_capacity(layers + 1);
        let mut pres = Vec::with_capacity(layers);
        acts.push(input.to_vec());
        for l in 0..layers {
            let (w, b) = self.layer(l);
            let (rows, cols) = (self.dims[l + 1], self.dims[l]);
            let mut z = b.to_vec();
            matvec_acc(w, rows, cols, &acts[l], &mut z);
            let a = if l + 1 == layers {
                z.iter().map(|&v| self.output.apply(v)).collect()
            } else {
                z.iter().map(|&v| v.max(0.0)).collect()
            };
            pres.push(z);
            acts.push(a);
        }
        Ok(DenseCache {
            acts,
            pres,
            version: self.version,
        })
    }

    /// Convenience forward without keeping the cache.
    pub fn eval(&self, input: &[f64]) -> Result<Vec<f64>, NnError> {
        Ok(self.forward(input)?.output().to_vec())
    }

    /// Backpropagate `upstream` (dLoss/dOutput) through the cached pass.
    ///
    /// Returns the flat parameter gradient and the gradient w.r.t. the input.
    pub fn backward(
        &self,
        cache: &DenseCache,
        upstream: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>), NnError> {
        if cache.version != self.version {
            return Err(NnError::StaleCache);
        }
        if upstream.len() != self.output_dim() {
            return Err(NnError::ShapeMismatch {
                expected: self.output_dim(),
                got: upstream.len(),
            });
        }
        let layers = self.num_layers();
        let mut grads = vec![0.0; self.params.len()];
        // Output head.
        let y = cache.output();
        let mut dz: Vec<f64> = upstream
            .iter()
            .zip(y)
            .map(|(&u, &yi)| u * self.output.derivative_from_output(yi))
            .collect();
        let mut d_input = Vec::new();
        for l in (0..layers).rev() {
            let (off, rows, cols) = self.layer_offset(l);
            let a_prev = &cache.acts[l];
            for r in 0..rows {
                let g = dz[r];
                if g != 0.0 {
                    let wrow = &mut grads[off + r * cols..off + (r + 1) * cols];
                    for (gw, ap) in wrow.iter_mut().zip(a_prev) {
                        *gw += g * ap;
                    }
                }
                grads[off + rows * cols + r] += g;
            }
            let w = &self.params[off..off + rows * cols];
            let mut da = vec![0.0; cols];
            matvec_t_acc(w, rows, cols, &dz, &mut da);
            if l == 0 {
                d_input = da;
            } else {
                // Rectifier derivative off the stored pre-activation.
                let z_prev = &cache.pres[l - 1];
                dz = da
                    .iter()
                    .zip(z_prev)
                    .map(|(&d, &z)| if z > 0.0 { d } else { 0.0 })
                    .collect();
            }
        }
        Ok((grads, d_input))
    }
}
