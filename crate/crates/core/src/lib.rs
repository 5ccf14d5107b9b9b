//! Virial ansätze `χ_n = φ_n·χ_v` for the one-dimensional Schrödinger equation
//! with symmetric, strictly convex potentials, together with a finite-difference
//! reference solver to measure their accuracy.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod gamma;
pub mod integrate;
pub mod orthopoly;
pub mod potentials;
pub mod refsolver;
pub mod spectra;
pub mod tables;
pub mod virial;

pub use error::{Error, Result};
