//! Coverage analysis for downlink Poisson cellular networks in which each
//! user may be served jointly by its two closest base stations.
//!
//! The crate is `no_std` (with `alloc`) and carries the analytic engine,
//! the quadrature it relies on, and the Monte Carlo simulators used to
//! cross-check it.

#![no_std]

extern crate alloc;

mod real;

pub mod channel;
pub mod coverage;
pub mod error;
pub mod geometry;
pub mod interference;
pub mod optimize;
pub mod quad;
pub mod reference;
pub mod rng;
pub mod simulator;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use geometry::{Action, NeighborPair, Point, PointPattern, PolicyParams, Window};
pub use coverage::{coverage_probability, CoverageResult, Dpc};
pub use interference::SystemParams;
pub use optimize::{optimize_rho, RhoOptimum};
pub use reference::{reference_nocoop_coverage, reference_nocoop_result};
pub use simulator::{simulate_coverage, SimConfig, SimEstimate, SimMode};
