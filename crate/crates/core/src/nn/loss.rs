//! Softmax and negative log likelihood.

use super::NnError;

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

/// Result of an NLL evaluation.
#[derive(Debug, Clone)]
pub struct NllResult {
    pub loss: f64,
    /// Gradient w.r.t. the logits that produced `probs`: `probs - one_hot(label)`.
    pub grad_logits: Vec<f64>,
    /// True when the label probability had to be clamped away from zero.
    pub clamped: bool,
}

const PROB_FLOOR: f64 = 1e-12;

/// `-log(probs[label])` with the softmax-logit gradient.
pub fn nll_loss(probs: &[f64], label: usize) -> Result<NllResult, NnError> {
    if label >= probs.len() {
        return Err(NnError::ShapeMismatch {
            expected: probs.len(),
            got: label,
        });
    }
    let p = probs[label];
    let clamped = p < PROB_FLOOR;
    let loss = -p.max(PROB_FLOOR).ln();
    let mut grad_logits = probs.to_vec();
    grad_logits[label] -= 1.0;
    Ok(NllResult {
        loss,
        grad_logits,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_normalizes() {
        let p = softmax(&[1.0, 2.0, 3.0, -1.0]);
        let sum: f64 = p.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(p.windows(2).take(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn softmax_handles_large_logits() {
        let p = softmax(&[1000.0, 1000.0]);
        assert!((p[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn uniform_loss_is_ln_k() {
        let probs = vec![1.0 / 3.0; 3];
        for label in 0..3 {
            let r = nll_loss(&probs, label).unwrap();
            assert!((r.loss - 1.0986122886681098).abs() < 1e-12);
        }
    }

    #[test]
    fn certain_label_zero_loss() {
        let r = nll_loss(&[0.0, 1.0, 0.0], 1).unwrap();
        assert_eq!(r.loss, 0.0);
        assert!(!r.clamped);
    }

    #[test]
    fn frozen_example() {
        // -ln 0.7, frozen from a 40-digit evaluation.
        let r = nll_loss(&[0.7, 0.2, 0.1], 0).unwrap();
        assert!((r.loss - 0.356_674_943_938_732_34).abs() < 1e-12);
        assert!((r.grad_logits[0] - (0.7 - 1.0)).abs() < 1e-15);
        assert!((r.grad_logits[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_probability_clamps_and_flags() {
        let r = nll_loss(&[0.0, 1.0], 0).unwrap();
        assert!(r.clamped);
        assert!((r.loss - (-(1e-12f64).ln())).abs() < 1e-9);
    }

    #[test]
    fn bad_label_rejected() {
        assert!(nll_loss(&[0.5, 0.5], 2).is_err());
    }
}
