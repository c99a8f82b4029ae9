//! Gated recurrent sequence classifier (LSTM cell + linear readout).

use rand::Rng;

use super::{matvec_acc, matvec_t_acc, softmax, NnError};

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Single-layer LSTM over a fixed-length observation window, classifying the
/// sequence through a softmax readout of the final hidden state.
///
/// Parameter layout: gate matrix `W` (4H x (I+H), gate order input/forget/
/// cell/output, rows per gate contiguous), gate bias (4H), readout weight
/// (K x H), readout bias (K).
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrentClassifier {
    input_dim: usize,
    hidden_dim: usize,
    num_classes: usize,
    window: usize,
    params: Vec<f64>,
    version: u64,
}

/// Per-step intermediates kept for backpropagation through time.
#[derive(Debug, Clone)]
struct StepCache {
    z: Vec<f64>, // [x_t ; h_{t-1}]
    gi: Vec<f64>,
    gf: Vec<f64>,
    gg: Vec<f64>,
    go: Vec<f64>,
    c: Vec<f64>,
    tanh_c: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LstmCache {
    steps: Vec<StepCache>,
    h_last: Vec<f64>,
    probs: Vec<f64>,
    version: u64,
}

impl LstmCache {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

impl RecurrentClassifier {
    pub fn param_count(input_dim: usize, hidden_dim: usize, num_classes: usize) -> usize {
        4 * hidden_dim * (input_dim + hidden_dim) + 4 * hidden_dim
            + num_classes * hidden_dim
            + num_classes
    }

    pub fn zeros(input_dim: usize, hidden_dim: usize, num_classes: usize, window: usize) -> Self {
        assert!(input_dim > 0 && hidden_dim > 0 && num_classes > 0 && window > 0);
        Self {
            input_dim,
            hidden_dim,
            num_classes,
            window,
            params: vec![0.0; Self::param_count(input_dim, hidden_dim, num_classes)],
            version: 0,
        }
    }

    /// Random init, uniform in +-1/sqrt(fan_in) of each block.
    pub fn init<R: Rng + ?Sized>(
        input_dim: usize,
        hidden_dim: usize,
        num_classes: usize,
        window: usize,
        rng: &mut R,
    ) -> Self {
        let mut net = Self::zeros(input_dim, hidden_dim, num_classes, window);
        let gate_in = input_dim + hidden_dim;
        let gate_bound = 1.0 / (gate_in as f64).sqrt();
        let read_bound = 1.0 / (hidden_dim as f64).sqrt();
        let gate_params = 4 * hidden_dim * gate_in + 4 * hidden_dim;
        for (idx, p) in net.params.iter_mut().enumerate() {
            let bound = if idx < gate_params { gate_bound } else { read_bound };
            *p = rng.random_range(-bound..bound);
        }
        net
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        self.version += 1;
        &mut self.params
    }

    pub(crate) fn from_parts(
        input_dim: usize,
        hidden_dim: usize,
        num_classes: usize,
        window: usize,
        params: Vec<f64>,
    ) -> Self {
        assert_eq!(
            params.len(),
            Self::param_count(input_dim, hidden_dim, num_classes)
        );
        Self {
            input_dim,
            hidden_dim,
            num_classes,
            window,
            params,
            version: 0,
        }
    }

    fn gate_w(&self) -> &[f64] {
        &self.params[..4 * self.hidden_dim * (self.input_dim + self.hidden_dim)]
    }

    fn gate_b(&self) -> &[f64] {
        let off = 4 * self.hidden_dim * (self.input_dim + self.hidden_dim);
        &self.params[off..off + 4 * self.hidden_dim]
    }

    fn read_w(&self) -> &[f64] {
        let off = 4 * self.hidden_dim * (self.input_dim + self.hidden_dim) + 4 * self.hidden_dim;
        &self.params[off..off + self.num_classes * self.hidden_dim]
    }

    fn read_b(&self) -> &[f64] {
        let n = self.params.len();
        &self.params[n - self.num_classes..]
    }

    /// Run the window through the cell and return class probabilities with
    /// the intermediates needed for backprop.
    pub fn forward(&self, sequence: &[Vec<f64>]) -> Result<LstmCache, NnError> {
        if sequence.len() != self.window {
            return Err(NnError::ShapeMismatch {
                expected: self.window,
                got: sequence.len(),
            });
        }
        let (i_dim, h) = (self.input_dim, self.hidden_dim);
        let gate_in = i_dim + h;
        let mut hidden = vec![0.0; h];
        let mut cell = vec![0.0; h];
        let mut steps = Vec::with_capacity(sequence.len());
        for x in sequence {
            if x.len() != i_dim {
                return Err(NnError::ShapeMismatch {
                    expected: i_dim,
                    got: x.len(),
                });
            }
            let mut z = Vec::with_capacity(gate_in);
            z.extend_from_slice(x);
            z.extend_from_slice(&hidden);
            let mut pre = self.gate_b().to_vec();
            matvec_acc(self.gate_w(), 4 * h, gate_in, &z, &mut pre);
            let gi: Vec<f64> = pre[..h].iter().map(|&v| sigmoid(v)).collect();
            let gf: Vec<f64> = pre[h..2 * h].iter().map(|&v| sigmoid(v)).collect();
            let gg: Vec<f64> = pre[2 * h..3 * h].iter().map(|&v| v.tanh()).collect();
            let go: Vec<f64> = pre[3 * h..4 * h].iter().map(|&v| sigmoid(v)).collect();
            let mut c_new = vec![0.0; h];
            for j in 0..h {
                c_new[j] = gf[j] * cell[j] + gi[j] * gg[j];
            }
            let tanh_c: Vec<f64> = c_new.iter().map(|&v| v.tanh()).collect();
            for j in 0..h {
                hidden[j] = go[j] * tanh_c[j];
            }
            steps.push(StepCache {
                z,
                gi,
                gf,
                gg,
                go,
                c: c_new.clone(),
                tanh_c,
            });
            cell = c_new;
        }
        let mut logits = self.read_b().to_vec();
        matvec_acc(self.read_w(), self.num_classes, h, &hidden, &mut logits);
        Ok(LstmCache {
            steps,
            h_last: hidden,
            probs: softmax(&logits),
            version: self.version,
        })
    }

    /// Class probabilities only.
    pub fn predict(&self, sequence: &[Vec<f64>]) -> Result<Vec<f64>, NnError> {
        Ok(self.forward(sequence)?.probs)
    }

    /// Most probable class (ties break toward the lower index).
    pub fn predict_class(&self, sequence: &[Vec<f64>]) -> Result<usize, NnError> {
        let probs = self.predict(sequence)?;
        Ok(argmax(&probs))
    }

    /// Backpropagate a logit gradient (e.g. `probs - one_hot`) through time.
    pub fn backward(&self, cache: &LstmCache, dlogits: &[f64]) -> Result<Vec<f64>, NnError> {
        if cache.version != self.version {
            return Err(NnError::StaleCache);
        }
        if dlogits.len() != self.num_classes {
            return Err(NnError::ShapeMismatch {
                expected: self.num_classes,
                got: dlogits.len(),
            });
        }
        let (i_dim, h, k) = (self.input_dim, self.hidden_dim, self.num_classes);
        let gate_in = i_dim + h;
        let mut grads = vec![0.0; self.params.len()];
        let w_len = 4 * h * gate_in;
        let read_w_off = w_len + 4 * h;
        let read_b_off = read_w_off + k * h;

        // Readout layer.
        for r in 0..k {
            let g = dlogits[r];
            grads[read_b_off + r] += g;
            if g != 0.0 {
                for j in 0..h {
                    grads[read_w_off + r * h + j] += g * cache.h_last[j];
                }
            }
        }
        let mut dh = vec![0.0; h];
        matvec_t_acc(self.read_w(), k, h, dlogits, &mut dh);

        let mut dc = vec![0.0; h];
        let mut da = vec![0.0; 4 * h];
        for (t, step) in cache.steps.iter().enumerate().rev() {
            let c_prev: &[f64] = if t == 0 { &[] } else { &cache.steps[t - 1].c };
            for j in 0..h {
                let tc = step.tanh_c[j];
                let do_ = dh[j] * tc;
                let dcj = dc[j] + dh[j] * step.go[j] * (1.0 - tc * tc);
                let di = dcj * step.gg[j];
                let dg = dcj * step.gi[j];
                let cp = if t == 0 { 0.0 } else { c_prev[j] };
                let df = dcj * cp;
                // Pre-activation gradients via the gate nonlinearity slopes.
                da[j] = di * step.gi[j] * (1.0 - step.gi[j]);
                da[h + j] = df * step.gf[j] * (1.0 - step.gf[j]);
                da[2 * h + j] = dg * (1.0 - step.gg[j] * step.gg[j]);
                da[3 * h + j] = do_ * step.go[j] * (1.0 - step.go[j]);
                dc[j] = dcj * step.gf[j];
            }
            for r in 0..4 * h {
                let g = da[r];
                grads[w_len + r] += g;
                if g != 0.0 {
                    let row = &mut grads[r * gate_in..(r + 1) * gate_in];
                    for (gw, zj) in row.iter_mut().zip(&step.z) {
                        *gw += g * zj;
                    }
                }
            }
            let mut dz = vec![0.0; gate_in];
            matvec_t_acc(self.gate_w(), 4 * h, gate_in, &da, &mut dz);
            dh.copy_from_slice(&dz[i_dim..]);
        }
        Ok(grads)
    }
}

/// Index of the maximum element; first index wins ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
