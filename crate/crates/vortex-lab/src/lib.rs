//! Numerical laboratory for volume expansion and Lyapunov chaos of online
//! learning dynamics (MWU and FTRL) in zero-sum, graphical constant-sum,
//! rock-paper-scissors, and 2x2 games.
//!
//! The crate simulates the dual-space (cumulative payoff) dynamics, builds
//! one-step Jacobians, computes the second-order volume coefficient with its
//! theoretical lower bounds and step-size thresholds, evolves point clouds to
//! measure empirical volume growth, and quantifies chaos via divergence
//! curves and boundary times.

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod games;
pub mod report;
pub mod volume;

pub use error::{Error, Result};
