//! Coupled quasiperiodic chains and the critical phase.
//!
//! This crate constructs tight-binding Hamiltonians for single and coupled
//! quasiperiodic chains on Fibonacci rings, diagonalizes them exactly, and
//! quantifies extended, localized, and critical behavior through wave-function
//! statistics: q-moments and fractal dimensions, minimal scaling indices and
//! their distributions, finite-size extrapolation, wave-packet spreading
//! exponents, eigenstate-overlap fidelity between coupled and decoupled
//! systems, and the effective-potential (self-energy) diagnostics of the
//! projected single-chain equations. A finite-difference solver covers the
//! spin-dependent bichromatic continuum analogue.
//!
//! Conventions used throughout: ħ = 1, energies in units of the reference
//! hopping, site index m starts at 0, periodic boundary conditions on lattice
//! models, and state labels in emitted files are 1-based.

pub mod continuum;
pub mod dynamics;
pub mod effective;
mod error;
pub mod hybridization;
mod matrix;
pub mod models;
pub mod multifractal;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{matmul_abt, SymMatrix};
