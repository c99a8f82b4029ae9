//! Desk-scale lab for CIO-driven load balancing in multi-cell networks.
//!
//! The crate couples a discrete-time radio/traffic simulator (`netsim`) with
//! a shaped per-cell reward (`reward`), a from-scratch neural substrate
//! (`nn`), a multi-agent deterministic policy-gradient learner with adaptive
//! subpolicy selection (`marl`), a centralized clipped double Q baseline
//! (`cdql`), and an experiment harness (`harness`) that drives training,
//! execution, and metric export.

pub mod nn;
pub mod reward;
pub mod rng;
