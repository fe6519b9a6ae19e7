//! scalarlab: a pseudospectral toolkit for transport and active scalar
//! equations on the unit torus.
//!
//! The crate provides the periodic spectral substrate (grids, transforms,
//! derivatives, L^p norms), unit-mass mollifiers with smoothing-rate sweeps,
//! Littlewood-Paley decomposition and two Besov norm estimators,
//! divergence-free Fourier multiplier couplings (SQG, IPM), commutator
//! residual diagnostics for renormalized conservation in transport, and a
//! dealiased RK4 advection solver producing trajectories those diagnostics
//! consume.

pub mod besov;
pub mod commutator;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod littlewood_paley;
pub mod mollifier;
pub mod multiplier;
pub mod ratefit;
pub mod renorm;
pub mod solver;
pub mod spacetime;
pub mod synth;

mod fft;
mod smooth;

pub use error::{Error, Result};
pub use field::{ScalarField, VectorField};
pub use grid::Grid;
pub use ratefit::RateFit;
