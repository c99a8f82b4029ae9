//! Minimal neural substrate: dense nets with exact backprop, an LSTM
//! sequence classifier, Adam, Polyak target averaging, and checkpoint IO.
//!
//! Everything is plain `Vec<f64>` on the CPU. Networks keep their parameters
//! in one flat buffer so the optimizer, target updates, serialization, and
//! gradient checks all operate on a single slice.

mod adam;
mod checkpoint;
mod dense;
mod loss;
mod lstm;

pub use adam::{polyak_update, Adam};
pub use checkpoint::{load_dense, load_recurrent, save_dense, save_recurrent};
pub use dense::{DenseCache, DenseNet, OutputActivation};
pub use loss::{nll_loss, softmax, NllResult};
pub use lstm::{LstmCache, RecurrentClassifier};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("forward cache is stale: network parameters changed since it was built")]
    StaleCache,
    #[error("non-finite gradient encountered; update aborted")]
    NonFiniteGradient,
    #[error("tau must lie in [0, 1], got {0}")]
    BadTau(f64),
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
}

/// y += M x, with M given row-major as `rows x cols`.
pub(crate) fn matvec_acc(m: &[f64], rows: usize, cols: usize, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(m.len(), rows * cols);
    debug_assert_eq!(x.len(), cols);
    debug_assert_eq!(y.len(), rows);
    for r in 0..rows {
        let row = &m[r * cols..(r + 1) * cols];
        let mut acc = 0.0;
        for (w, xi) in row.iter().zip(x) {
            acc += w * xi;
        }
        y[r] += acc;
    }
}

/// y += M^T x, with M given row-major as `rows x cols` (x has len rows).
pub(crate) fn matvec_t_acc(m: &[f64], rows: usize, cols: usize, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(m.len(), rows * cols);
    debug_assert_eq!(x.len(), rows);
    debug_assert_eq!(y.len(), cols);
    for r in 0..rows {
        let xr = x[r];
        if xr == 0.0 {
            continue;
        }
        let row = &m[r * cols..(r + 1) * cols];
        for (yc, w) in y.iter_mut().zip(row) {
            *yc += w * xr;
        }
    }
}
