//! Point-island deposition rate equations with a critical island size `i`.
//!
//! The crate covers the truncated infinite system and the `(i+1)`-dimensional
//! reduced system, an adaptive integrator, exact centre-manifold and
//! quasi-steady-state series, the compartmental structure of the closed
//! subsystem, and the leading-order large-time laws.

pub mod asymptotics;
pub mod centre_manifold;
pub mod compartment;
pub mod error;
pub mod export;
pub mod integrator;
pub mod model;
pub mod poly;
pub mod qssa;
pub mod rational;
pub mod series;
pub mod simulation;

pub use error::{Error, Result};
pub use integrator::{integrate, IntegrationConfig, Trajectory, VectorField};
pub use model::{ModelParams, ReducedState, TruncatedState};
pub use rational::Rational;
