//! Network geometry and UE placement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SimError, SimParams};
use crate::rng::derive_rng;

/// Static geometry of the simulated network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub num_bs: usize,
    pub bs_positions: Vec<[f64; 2]>,
    pub inter_site_distance_m: f64,
    pub num_ue: usize,
    pub ue_positions: Vec<[f64; 2]>,
    pub num_rb: usize,
    pub rbg_size: usize,
    pub tx_power_dbm: f64,
    pub bs_antenna_height_m: f64,
    pub ue_antenna_height_m: f64,
}

impl NetworkTopology {
    pub fn new(
        bs_positions: Vec<[f64; 2]>,
        ue_positions: Vec<[f64; 2]>,
        inter_site_distance_m: f64,
        num_rb: usize,
        rbg_size: usize,
        tx_power_dbm: f64,
        bs_antenna_height_m: f64,
        ue_antenna_height_m: f64,
    ) -> Result<Self, SimError> {
        let topo = Self {
            num_bs: bs_positions.len(),
            bs_positions,
            inter_site_distance_m,
            num_ue: ue_positions.len(),
            ue_positions,
            num_rb,
            rbg_size,
            tx_power_dbm,
            bs_antenna_height_m,
            ue_antenna_height_m,
        };
        topo.validate()?;
        Ok(topo)
    }

    /// Collinear sites at the inter-site spacing, UEs placed per the scenario
    /// seed: a fraction on an edge ring around every BS, the rest uniform
    /// around the middle site.
    pub fn generate(params: &SimParams, seed: u64) -> Result<Self, SimError> {
        let m = params.num_bs;
        let isd = params.inter_site_distance_m;
        let half_span = (m as f64 - 1.0) / 2.0;
        let bs_positions: Vec<[f64; 2]> = (0..m)
            .map(|i| [(i as f64 - half_span) * isd, 0.0])
            .collect();
        let middle = bs_positions[m / 2];

        let mut rng = derive_rng(seed, "placement", &[]);
        let n = params.num_ue;
        let n_edge = ((params.edge_fraction * n as f64).round() as usize).min(n);
        let mut ue_positions = Vec::with_capacity(n);
        for u in 0..n_edge {
            let bs = u % m;
            let r = rng.random_range(params.edge_ring_inner..params.edge_ring_outer) * isd;
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            ue_positions.push([
                bs_positions[bs][0] + r * theta.cos(),
                bs_positions[bs][1] + r * theta.sin(),
            ]);
        }
        // Fill the remainder uniformly over a disc around the middle site.
        let fill_r = params.center_fill_radius * isd;
        for _ in n_edge..n {
            let r = fill_r * rng.random_range(0.0f64..1.0).sqrt();
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            ue_positions.push([middle[0] + r * theta.cos(), middle[1] + r * theta.sin()]);
        }

        Self::new(
            bs_positions,
            ue_positions,
            isd,
            params.num_rb,
            params.rbg_size,
            params.tx_power_dbm,
            params.bs_antenna_height_m,
            params.ue_antenna_height_m,
        )
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.num_bs < 2 {
            return Err(SimError::BadTopology(format!(
                "need at least 2 base stations, got {}",
                self.num_bs
            )));
        }
        if self.num_ue < 1 {
            return Err(SimError::BadTopology("need at least one UE".into()));
        }
        if self.num_rb < 1 {
            return Err(SimError::BadTopology("need at least one resource block".into()));
        }
        if !(1..=4).contains(&self.rbg_size) {
            return Err(SimError::BadTopology(format!(
                "resource block group size must be 1..=4, got {}",
                self.rbg_size
            )));
        }
        if !(self.inter_site_distance_m > 0.0) {
            return Err(SimError::BadTopology("inter-site distance must be positive".into()));
        }
        let finite = |p: &[f64; 2]| p[0].is_finite() && p[1].is_finite();
        if !self.bs_positions.iter().all(finite) || !self.ue_positions.iter().all(finite) {
            return Err(SimError::BadTopology("non-finite position".into()));
        }
        if !self.tx_power_dbm.is_finite()
            || !self.bs_antenna_height_m.is_finite()
            || !self.ue_antenna_height_m.is_finite()
        {
            return Err(SimError::BadTopology("non-finite radio parameter".into()));
        }
        Ok(())
    }

    /// 3-D distance between a BS and a UE, including antenna heights.
    pub fn distance_m(&self, bs: usize, ue: usize) -> f64 {
        let b = self.bs_positions[bs];
        let u = self.ue_positions[ue];
        let dh = self.bs_antenna_height_m - self.ue_antenna_height_m;
        ((b[0] - u[0]).powi(2) + (b[1] - u[1]).powi(2) + dh * dh).sqrt()
    }
}
