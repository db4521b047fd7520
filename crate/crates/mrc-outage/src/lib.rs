// Validation deliberately writes `!(v > 0.0)` instead of `v <= 0.0`: the
// negated form also rejects NaN, which would sail through the suggested
// rewrite.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Outage probability of an N-antenna maximum-ratio-combining receiver in a
//! Poisson field of Rayleigh-faded interferers.
//!
//! The SIR after combining is Σₙ gₙ d^{−α} / Iₙ, where the per-antenna
//! interference powers Iₙ = Σᵢ h_{n,i} ‖xᵢ‖^{−α} share one Poisson set of
//! interferer locations {xᵢ} and are therefore correlated across antennas.
//! This crate provides:
//!
//! - [`core`]: parameters, the single-antenna closed form, scale invariance;
//! - [`quadrature`]: an adaptive Gauss-Kronrod engine and the exact
//!   dual-antenna CCDF/CDF (general α, plus an α = 4 closed-form route);
//! - [`bounds`]: Laplace-derivative machinery (Bell-polynomial recurrence)
//!   and the full-correlation, min-fading, and max-fading CCDFs for any N,
//!   with N = 2 and N = 4 closed forms and the small-density slope bounds;
//! - [`simulator`]: a seeded, reproducible Monte Carlo sampler for all five
//!   interference-correlation models, with Wilson confidence intervals;
//! - [`analysis`]: critical-density solvers, the density-diversity slope
//!   fit, model-deviation ratios, and the √N gain fit.

pub mod analysis;
pub mod bounds;
pub mod core;
pub mod error;
pub mod quadrature;
pub mod simulator;
pub mod special;

pub use crate::core::{ModelKind, Probability, SystemParams};
pub use crate::error::{Error, Result};
pub use crate::quadrature::{IntegrationResult, QuadratureConfig};
pub use crate::simulator::{CcdfEstimate, MonteCarloConfig, WindowRadius};
