//! Shaped per-cell reward.
//!
//! A cell's reward is its summed UE throughput, scaled by two sigmoid terms:
//! a per-UE delay term (with a hard penalty for UEs that lost connectivity)
//! and a cell-level resource-utilization term. All functions here are pure;
//! the simulator supplies the inputs once per observation window.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RewardError {
    #[error("invalid reward parameter: {0}")]
    InvalidParam(String),
    #[error("delay must be a finite non-negative number, got {0}")]
    BadDelay(f64),
    #[error("utilization must lie in [0, 1], got {0}")]
    BadUtilization(f64),
}

/// Multiple of the packet delay budget at which a connected-but-starved UE
/// (no packet delivered in the window) is scored; matches the queue drop
/// horizon so starvation is maximally penalized without the disconnect branch.
pub const STARVED_DELAY_PDBS: f64 = 5.0;

/// Parameters of the reward chain.
///
/// `target_delay` is tied to the packet delay budget (`2/3 * pdb`);
/// construct through [`RewardParams::new`] so the coupling holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardParams {
    /// Slope bound of both sigmoids; negative so the terms decrease.
    pub c: f64,
    /// Delay sigmoid slope (1/s).
    pub o: f64,
    /// Utilization sigmoid slope.
    pub a: f64,
    /// Target packet delay in seconds (2/3 of the delay budget).
    pub target_delay: f64,
    /// Target resource block utilization, in (0, 1).
    pub target_rbu: f64,
    /// Packet delay budget in seconds.
    pub pdb: f64,
}

impl RewardParams {
    pub fn new(c: f64, o: f64, a: f64, target_rbu: f64, pdb: f64) -> Result<Self, RewardError> {
        if !c.is_finite() {
            return Err(RewardError::InvalidParam(format!("c = {c}")));
        }
        if !(o > 0.0) || !o.is_finite() {
            return Err(RewardError::InvalidParam(format!("o = {o}")));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(RewardError::InvalidParam(format!("a = {a}")));
        }
        if !(pdb > 0.0) || !pdb.is_finite() {
            return Err(RewardError::InvalidParam(format!("pdb = {pdb}")));
        }
        if !(target_rbu > 0.0 && target_rbu < 1.0) {
            return Err(RewardError::InvalidParam(format!(
                "target_rbu = {target_rbu}"
            )));
        }
        Ok(Self {
            c,
            o,
            a,
            target_delay: 2.0 / 3.0 * pdb,
            target_rbu,
            pdb,
        })
    }

    /// Delay charged to a connected UE that delivered nothing in the window.
    pub fn starved_delay(&self) -> f64 {
        STARVED_DELAY_PDBS * self.pdb
    }
}

impl Default for RewardParams {
    /// c = -2, o = 75, a = 20, target RBU 0.8, PDB 150 ms.
    fn default() -> Self {
        Self::new(-2.0, 75.0, 20.0, 0.8, 0.150).expect("default params are valid")
    }
}

/// Delay score `1 + c / (1 + e^{-o (d_avg - target_delay)})`.
///
/// Monotonically decreasing in `d_avg` for c < 0, equal to `1 + c/2` at the
/// target delay, and confined to (-1, 1) for c = -2.
pub fn daleth(d_avg: f64, params: &RewardParams) -> Result<f64, RewardError> {
    if d_avg.is_nan() || d_avg < 0.0 {
        return Err(RewardError::BadDelay(d_avg));
    }
    Ok(1.0 + params.c / (1.0 + (-params.o * (d_avg - params.target_delay)).exp()))
}

/// Per-UE score: -1 if the UE lost connectivity, otherwise the delay score.
///
/// `d_avg = None` means the UE is attached but delivered nothing this window;
/// it is charged the starvation delay (the queue drop horizon).
pub fn delta_i(
    connected: bool,
    d_avg: Option<f64>,
    params: &RewardParams,
) -> Result<f64, RewardError> {
    if !connected {
        return Ok(-1.0);
    }
    daleth(d_avg.unwrap_or_else(|| params.starved_delay()), params)
}

/// Mean of per-UE scores; an empty cell has nothing to judge and scores 0.
pub fn epsilon1(deltas: &[f64]) -> f64 {
    if deltas.is_empty() {
        return 0.0;
    }
    deltas.iter().sum::<f64>() / deltas.len() as f64
}

/// Utilization score `1 + c / (2 + 2 e^{-a (p - target_rbu)})`.
///
/// Monotonically decreasing in `p` for c < 0, equal to `1 + c/4` at the
/// target utilization, and confined to (0, 1) for c = -2.
pub fn epsilon2(p: f64, params: &RewardParams) -> Result<f64, RewardError> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(RewardError::BadUtilization(p));
    }
    Ok(1.0 + params.c / (2.0 + 2.0 * (-params.a * (p - params.target_rbu)).exp()))
}

/// Cell reward: `eps2(p) * [(U_c + sum(delta_i)) / U_c] * sum(R_i)`.
///
/// `throughputs` and `deltas` must cover the same UEs, one entry each; UEs
/// that lost connectivity during the window are carried with throughput 0 and
/// delta -1. An empty cell earns 0.
pub fn bs_reward(
    throughputs: &[f64],
    deltas: &[f64],
    p: f64,
    params: &RewardParams,
) -> Result<f64, RewardError> {
    assert_eq!(
        throughputs.len(),
        deltas.len(),
        "throughput and delta lists must cover the same UEs"
    );
    let u_c = throughputs.len();
    if u_c == 0 {
        return Ok(0.0);
    }
    let eps2 = epsilon2(p, params)?;
    let bracket = (u_c as f64 + deltas.iter().sum::<f64>()) / u_c as f64;
    Ok(eps2 * bracket * throughputs.iter().sum::<f64>())
}

/// Variant using the network-wide mean of per-UE scores instead of the
/// per-cell bracket: `eps2(p) * (1 + eps1_global) * sum(R_i)`.
pub fn bs_reward_global(
    throughputs: &[f64],
    epsilon1_global: f64,
    p: f64,
    params: &RewardParams,
) -> Result<f64, RewardError> {
    if throughputs.is_empty() {
        return Ok(0.0);
    }
    let eps2 = epsilon2(p, params)?;
    Ok(eps2 * (1.0 + epsilon1_global) * throughputs.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> RewardParams {
        RewardParams::default()
    }

    // Frozen against a 40-digit evaluation of the same formulas.
    const DALETH_AT_ZERO: f64 = 0.998_894_442_726_152_8;
    const EPS2_AT_ONE: f64 = 0.017_986_209_962_091_558;
    const EPS2_AT_ZERO: f64 = 0.999_999_887_464_837_9;

    #[test]
    fn daleth_midpoint_is_one_plus_half_c() {
        let p = params();
        assert_eq!(daleth(p.target_delay, &p).unwrap(), 0.0);
    }

    #[test]
    fn daleth_extremes_match_oracle() {
        let p = params();
        assert!((daleth(0.0, &p).unwrap() - DALETH_AT_ZERO).abs() < 1e-12);
        assert!((daleth(0.2, &p).unwrap() + DALETH_AT_ZERO).abs() < 1e-12);
    }

    #[test]
    fn daleth_rejects_nan_and_negative() {
        let p = params();
        assert!(daleth(f64::NAN, &p).is_err());
        assert!(daleth(-0.1, &p).is_err());
    }

    #[test]
    fn delta_branches() {
        let p = params();
        assert_eq!(delta_i(false, Some(0.0), &p).unwrap(), -1.0);
        assert_eq!(delta_i(true, Some(p.target_delay), &p).unwrap(), 0.0);
        assert!((delta_i(true, Some(0.0), &p).unwrap() - DALETH_AT_ZERO).abs() < 1e-12);
        // Starved UE is charged the drop horizon, deep in the penalty tail.
        let starved = delta_i(true, None, &p).unwrap();
        assert!(starved < -0.999);
    }

    #[test]
    fn epsilon1_means() {
        assert_eq!(epsilon1(&[-1.0, 1.0, 0.0]), 0.0);
        assert_eq!(epsilon1(&[-1.0, -1.0]), -1.0);
        let d = DALETH_AT_ZERO;
        assert!((epsilon1(&[d, d]) - d).abs() < 1e-15);
        assert_eq!(epsilon1(&[]), 0.0);
    }

    #[test]
    fn epsilon2_values_match_oracle() {
        let p = params();
        assert_eq!(epsilon2(p.target_rbu, &p).unwrap(), 0.5);
        assert!((epsilon2(1.0, &p).unwrap() - EPS2_AT_ONE).abs() < 1e-12);
        assert!((epsilon2(0.0, &p).unwrap() - EPS2_AT_ZERO).abs() < 1e-12);
    }

    #[test]
    fn epsilon2_rejects_out_of_range() {
        let p = params();
        assert!(epsilon2(-0.01, &p).is_err());
        assert!(epsilon2(1.01, &p).is_err());
        assert!(epsilon2(f64::NAN, &p).is_err());
    }

    #[test]
    fn bs_reward_examples() {
        let p = params();
        // eps2 = 0.5 exactly at the target utilization.
        let r = bs_reward(&[1e6, 3e6], &[0.0, 0.0], p.target_rbu, &p).unwrap();
        assert!((r - 2e6).abs() < 1e-6);
        // Full penalty annihilates the bracket.
        let r = bs_reward(&[5e6, 1e6], &[-1.0, -1.0], 0.3, &p).unwrap();
        assert_eq!(r, 0.0);
        // Empty cell.
        assert_eq!(bs_reward(&[], &[], 0.5, &p).unwrap(), 0.0);
    }

    #[test]
    fn reward_linear_in_throughput() {
        let p = params();
        let deltas = [0.4, -0.2, 0.9];
        let base = bs_reward(&[1e5, 2e5, 3e5], &deltas, 0.6, &p).unwrap();
        let scaled = bs_reward(&[3e5, 6e5, 9e5], &deltas, 0.6, &p).unwrap();
        assert!((scaled - 3.0 * base).abs() <= 1e-9 * scaled.abs());
    }

    #[test]
    fn params_validation() {
        assert!(RewardParams::new(-2.0, 0.0, 20.0, 0.8, 0.15).is_err());
        assert!(RewardParams::new(-2.0, 75.0, -1.0, 0.8, 0.15).is_err());
        assert!(RewardParams::new(-2.0, 75.0, 20.0, 1.0, 0.15).is_err());
        assert!(RewardParams::new(-2.0, 75.0, 20.0, 0.8, 0.0).is_err());
        assert!(RewardParams::new(f64::NAN, 75.0, 20.0, 0.8, 0.15).is_err());
        let p = params();
        assert!((p.target_delay - 0.1).abs() < 1e-15);
    }

    #[test]
    fn sigmoid_ranges_with_default_c() {
        let p = params();
        // Sweep both domains; c = -2 keeps daleth in (-1, 1) and eps2 in (0, 1).
        // Far in the delay tail the double saturates to exactly -1, so the
        // sweep asserts the closed bound and strictness is checked where the
        // format has headroom.
        for i in 0..=1000 {
            let d = i as f64 * 0.002; // 0 .. 2 s
            let v = daleth(d, &p).unwrap();
            assert!((-1.0..1.0).contains(&v), "daleth({d}) = {v}");
            let u = i as f64 / 1000.0;
            let w = epsilon2(u, &p).unwrap();
            assert!(w > 0.0 && w < 1.0, "epsilon2({u}) = {w}");
        }
        assert!(daleth(0.0, &p).unwrap() < 1.0);
        assert!(daleth(0.4, &p).unwrap() > -1.0);
    }

    #[test]
    fn monotonicity() {
        let p = params();
        let mut prev = f64::INFINITY;
        for i in 0..=400 {
            let v = daleth(i as f64 * 0.001, &p).unwrap();
            assert!(v < prev);
            prev = v;
        }
        let mut prev = f64::INFINITY;
        for i in 0..=400 {
            let v = epsilon2(i as f64 / 400.0, &p).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }
}
