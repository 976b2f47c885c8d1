//! Numerical laboratory for semiclassical Schrödinger equations
//! `i eps u_t + eps^2/2 Lap u = V u + lambda |u|^{2 sigma} u`
//! with quadratic potentials `V`.
//!
//! The numerical core is generic over the real scalar (`f32` or `f64`);
//! the aliases at the bottom of this file fix the common choices.

// `!(x > 0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod observables;
pub mod potential;
pub mod propagator;
pub mod resample;
pub mod scalar;
pub mod scenarios;
pub mod solver;
pub mod transforms;

pub use error::{NlspError, Result};
pub use grid::{Axis, Grid, WaveFunction};
pub use potential::{AxisPotential, PotentialClassification, QuadraticPotential, Signature};
pub use scalar::Real;
pub use solver::{Monitors, Nonlinearity, RunOutcome, RunStatus, SolverConfig, Splitting};

pub use num_complex::Complex;

pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type WaveFunction64 = WaveFunction<f64>;
pub type WaveFunction32 = WaveFunction<f32>;
pub type Potential64 = QuadraticPotential<f64>;
pub type Potential32 = QuadraticPotential<f32>;
