//! Stein's method of moments for discrete distributions on integer lattices.
//!
//! The crate is organised around a small catalog of lattice distributions
//! ([`models`]), the discrete Stein operators and closed-form estimators built
//! on them ([`stein`]), the competing estimators they are benchmarked against
//! ([`baselines`]), plug-in estimation when the truncation box is unknown
//! ([`truncation`]), and a Monte Carlo harness that turns all of the above
//! into bias/MSE tables ([`harness`]).

pub mod baselines;
pub mod error;
pub mod io;
pub mod lattice;
pub mod models;
pub mod numerics;
pub mod rng;
pub mod stein;
pub mod truncation;
pub mod harness;

pub use error::{Error, Result};
pub use lattice::{Bound, LatticeBox, Sample};
pub use models::{Family, ModelSpec, Setting};
pub use stein::{EstimateResult, NeReason, TestFunction};
